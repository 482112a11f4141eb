#pragma once

#include "cbd/domination.hpp"

#include <functional>

namespace cbd {

// Multiplier tuples (a, b) for the generalized commutator f -> sum_i a_i T(b_i f).
// The classical choice a = (b, -1), b = (1, b) gives [b, T]; the iterated and
// mixed kinds expand (b(x)-b(y))^k and (b1(x)-b1(y))(b2(x)-b2(y)).
struct SymbolPair {
    enum class Kind { classical, iterated, mixed, custom };
    Kind kind = Kind::custom;
    std::vector<Eigen::VectorXd> a, b;  // per-cell scalar components
    std::vector<Eigen::VectorXd> base;  // underlying symbols: {b} or {b1, b2}
    int order = 1;                      // k for the iterated kind

    int n() const { return static_cast<int>(a.size()); }
    // sum_i a_i(x) b_i(y)
    double pair_kernel(int xcell, int ycell) const;
};

SymbolPair build_classical(const Eigen::VectorXd& b);
// a_i(x) = C(k,i) b(x)^{k-i}, b_i(y) = (-b(y))^i; rejects k > 20.
SymbolPair build_iterated(const Eigen::VectorXd& b, int k);
SymbolPair build_mixed(const Eigen::VectorXd& b1, const Eigen::VectorXd& b2);
SymbolPair build_custom(std::vector<Eigen::VectorXd> a, std::vector<Eigen::VectorXd> b);

// (sum_i a_i T(b_i f))(x) for scalar f.
Eigen::VectorXd apply_generalized(const KernelOperator& T, const SymbolPair& pair, const Eigen::VectorXd& f);

// min over the two iteration orders of the normalized mixed L^s/L^t norms of
// F over cellsX x cellsY.
double mixed_min_norm(const std::function<double(int, int)>& F, const std::vector<int>& cellsX,
                      const std::vector<int>& cellsY, double s, double t);
double mixed_min_norm(const std::function<double(int, int)>& F, const DyadicGrid& grid, const Cube& q, double s,
                      double t);

// sup_Q (avg_Q |b - <b>_Q|^s)^{1/s} over all dyadic cubes.
double bmo_norm(const DyadicGrid& grid, const Eigen::VectorXd& b, double s);

struct AstReport {
    double A_st = 0.0;        // sup over dyadic Q of the mixed-min norm of a(x).b(y)
    double A_st_triple = 0.0; // same sup including the dilations 3Q (feeds the L^p chain)
    double S_s = 0.0;         // mixed kind only
    double T_s = 0.0;         // mixed kind only
    std::vector<double> bmo;  // BMO_s of the underlying symbols
    Cube argmax;
};

AstReport a_st_constants(const DyadicGrid& grid, const SymbolPair& pair, double s, double t);

struct PowerCheckReport {
    bool cellwise_ok = false;   // |B(x,y)| <= |b(x)-b(y)|^{alpha+beta} on all pairs
    bool integrated_ok = false; // (avg avg |B|^p)^{1/p} <= (2 ||b||_{BMO^p})^{alpha+beta} on all cubes
    double worst_cellwise = 0.0;
    double worst_integrated = 0.0;
    double bmo_p = 0.0;
};

// B(x,y) = b(x)^alpha b(y)^beta - b(x)^beta b(y)^alpha for b >= 0,
// alpha, beta >= 0, alpha + beta <= 1.
PowerCheckReport bmo_power_check(const DyadicGrid& grid, const Eigen::VectorXd& b, double alpha, double beta,
                                 double p);

// |u^d - v^d| max(u,v)^{1-d} <= |u - v| on random draws; returns violations.
int elementary_inequality_violations(int count, Rng& rng, double* worst_margin = nullptr);

struct CommutatorReport {
    AstReport constants;
    double lp_lower = 0.0;    // measured operator-norm lower bound on L^p
    bool lower_exact = false; // true when p = 2 (singular values)
    double lp_upper = 0.0;    // sparse-route bound for the maximizing pair
    double pipeline_C = 0.0;
    double pipeline_eta = 0.0;
    bool lower_le_upper = false;
    double s = 0.0, t = 0.0, p = 0.0;
};

// Measured L^p bound of the generalized commutator together with the
// sparse-route upper bound assembled from a pipeline run on the maximizer.
CommutatorReport lp_commutator_report(const KernelOperator& T, const SymbolPair& pair, double s, double t,
                                      double p, double eps = 0.05);

} // namespace cbd
