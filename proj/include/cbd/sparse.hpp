#pragma once

#include "cbd/bodies.hpp"
#include "cbd/rng.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cbd {

// A collection of dyadic cubes with pairwise disjoint witness cell sets
// E(Q) subset Q and |E(Q)| >= eta |Q|.
struct SparseFamily {
    const DyadicGrid* grid = nullptr;
    double eta = 1.0; // declared sparseness parameter
    std::string provenance;

    struct Member {
        Cube cube;
        std::vector<int> witness; // leaf cells
        double a_value = 0.0;     // pair-form value attached by the construction
    };
    std::vector<Member> members;
};

struct SparseCheck {
    bool ok = false;
    double min_ratio = 0.0; // worst |E(Q)|/|Q|
    int bad_i = -1, bad_j = -1;
    std::string what;
};

SparseCheck verify_sparse(const SparseFamily& fam);

// Exponents and stopping parameters of the pair form a_Q. The threshold A
// must satisfy n^{max(r,1)+r/2} / A^r <= 1 - delta so each stopping
// generation loses at least a delta fraction of measure.
struct PairFormConfig {
    int n = 1;
    double p = 1.0;
    double q = 1.0;
    double r = 0.5; // 1/r = 1/p + 1/q
    double A = 0.0;
    double delta = 0.5;

    double lemma_constant() const; // n^{max(r,1)+r/2}
    bool valid() const;
    static PairFormConfig defaults(int n, double p, double q, double delta = 0.5);
};

// Memoized evaluation of a_Q = dot(<<f>>_{avL^p(Q)}, <<g>>_{avL^q(Q)}) over
// the cube tree of one grid; all consumers of one instance see identical
// values, which keeps the two-sided estimates consistent.
class PairBodyCache {
public:
    PairBodyCache(const GridFunction& f, const GridFunction& g, double p, double q);

    double a(const Cube& cube);
    bool all_exact() const { return all_exact_; }
    const GridFunction& f() const { return *f_; }
    const GridFunction& g() const { return *g_; }
    const DyadicGrid& grid() const { return f_->grid(); }
    double p() const { return p_; }
    double q() const { return q_; }

private:
    const GridFunction* f_;
    const GridFunction* g_;
    double p_, q_;
    bool all_exact_ = true;
    std::vector<double> memo_; // NaN = unset, indexed by cube id
};

// sum_{Q in S} |Q| a_Q with both bodies over Q.
double sparse_form(const SparseFamily& fam, PairBodyCache& cache);
double sparse_form(const SparseFamily& fam, const GridFunction& f, const GridFunction& g, double p, double q);

// || sup_{Q in D} 1_Q a_Q ||_{L^1}: exact cellwise supremum over the
// ancestor chain, integrated over the torus.
double pair_maximal_l1(PairBodyCache& cache);

// Stopping-time family: children of Q are the maximal subcubes with
// a_{Q'} > A a_Q; witnesses are what remains of Q. Zero data gives {Q0}.
SparseFamily stopping_family(PairBodyCache& cache, const PairFormConfig& cfg);

struct EquivalenceReport {
    double sparse_value = 0.0;  // sparse form of the constructed family
    double maximal_value = 0.0; // pair maximal function L^1 norm
    double easy_ratio = 0.0;    // sparse_value / (maximal_value / delta)
    double hard_ratio = 0.0;    // maximal_value / (A * sparse_value)
    bool easy_ok = false;
    bool hard_ok = false;
    double family_eta = 0.0;
    bool family_sparse_ok = false;
    bool dots_exact = true;
    int family_size = 0;
};

EquivalenceReport equivalence_report(const GridFunction& f, const GridFunction& g, const PairFormConfig& cfg);

// Disjoint-cube power-sum bound: sum_i (A_i . B_i)^r over disjoint Q_i in
// D(Q0) against the bodies over Q0, with unnormalised L^p / L^q bodies.
struct DisjointSumCheck {
    double lhs = 0.0;
    double rhs = 0.0; // n^{max(r,1)+r/2} (A.B)^r
    bool ok = false;
    bool exact = true;
};
DisjointSumCheck disjoint_sum_check(const GridFunction& f, const GridFunction& g, const Cube& q0,
                                    const std::vector<Cube>& disjoint, double p, double q);

// Stopping mass bound: cubes selected by a_{Q'} >= A a_{Q0} have total
// measure at most n^{max(r,1)+r/2} A^{-r} |Q0|.
struct StoppingMassCheck {
    double selected_measure = 0.0;
    double bound = 0.0;
    bool ok = false;
    int selected_count = 0;
};
StoppingMassCheck stopping_mass_check(PairBodyCache& cache, const Cube& q0, double A, int n_for_bound);

struct StoppingChecksReport {
    int trials = 0;
    int violations_disjoint_sum = 0;
    int violations_stopping_mass = 0;
    double worst_disjoint_margin = 0.0; // max lhs/rhs observed
    double worst_mass_margin = 0.0;
};

// Random suite over both bounds in the exact-dot regime.
StoppingChecksReport stopping_inequality_checks(const DyadicGrid& grid, int n, double p, double q, int trials,
                                                Rng& rng);

// Random antichain of subcubes of q0 (used by the suites).
std::vector<Cube> random_antichain(const DyadicGrid& grid, const Cube& q0, Rng& rng, double select_prob = 0.35);

} // namespace cbd
