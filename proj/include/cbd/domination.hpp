#pragma once

#include "cbd/john.hpp"
#include "cbd/sparse.hpp"
#include "cbd/weights.hpp"

#include <map>
#include <string>
#include <vector>

namespace cbd {

// Discrete singular integral operator on a one-dimensional dyadic torus grid:
// (Tf)(x) = sum_y |cell| K(x,y) f(y), with K(x,x) = 0 (principal value
// analogue). Dense kernel storage caps the grid at L <= 12.
class KernelOperator {
public:
    enum class Kind { hilbert_periodic, dini_smooth };

    // K(x,y) = cot(pi(x-y)) at cell midpoints; antisymmetric.
    static KernelOperator hilbert_periodic(const DyadicGrid& grid);
    // K(x,y) = c dist(x,y)^{delta_mod - d}; |K| dist^d <= c everywhere.
    static KernelOperator dini_smooth(const DyadicGrid& grid, double c = 1.0, double delta_mod = 0.7);
    static KernelOperator make(const DyadicGrid& grid, const std::string& kind, double c = 1.0,
                               double delta_mod = 0.7);

    const DyadicGrid& grid() const { return *grid_; }
    Kind kind() const { return kind_; }
    const Eigen::MatrixXd& kernel() const { return k_; }
    double size_constant() const { return c_; }
    double dini_exponent() const { return delta_; }

    // componentwise application (scalar kernel tensor identity on E^n)
    GridFunction apply(const GridFunction& f) const;
    // exact L^2(torus) -> L^2(torus) norm of the scalar kernel matrix
    double l2_norm() const;

private:
    KernelOperator(const DyadicGrid& grid, Kind kind, Eigen::MatrixXd k, double c, double delta);
    const DyadicGrid* grid_;
    Kind kind_;
    Eigen::MatrixXd k_;
    double c_, delta_;
};

// t(f,g) = sum_i <T f_i, g_i> with the E/E* duality summed over inner
// components; bilinear, basis independent, t(Rf, g) = t(f, R^t g).
double bilinear_form(const KernelOperator& T, const GridFunction& f, const GridFunction& g);

// t(1_src f, 1_tgt g) for cell masks; memoized per cube by the pipeline.
double bilinear_form_masked(const KernelOperator& T, const GridFunction& f, const GridFunction& g,
                            const std::vector<int>& src_cells, const std::vector<int>& tgt_cells);

// Localized grand maximal truncation M_{T,Q} f(x) = max over dyadic
// x in Q' subset Q of max_{xi in Q'} ||T(1_{3Q \ 3Q'} f)(xi)||_E; one outer
// component. Returned in cell order of cells_of(Q).
Eigen::VectorXd grand_truncation(const KernelOperator& T, const Cube& q, const GridFunction& f);

struct SingleScaleResult {
    std::vector<Cube> exceptional; // maximal antichain of exceptional cubes
    double exceptional_mass = 0.0; // sum |Q_k| / |Q|
    double residual = 0.0;         // |t_Q - sum_j t_{Q_j}|
    double dot_value = 0.0;        // <<f>>_{avL1(3Q)} . <<g>>_{avL1(Q)}
    bool dot_exact = true;
    double c_meas = 0.0;           // residual / (dot |Q|)
    double scalar_c_max = 0.0;     // max per-coordinate scalar constant
    bool degenerate = false;       // projection branch used
    int rank = 0;
    double sandwich_ratio = 1.0;   // certified mvee outer factor / sqrt(rank)
};

// Cache of t_Q = t(1_{3Q}f, 1_Q g) shared across a pipeline run.
using TQCache = std::map<int, double>;

SingleScaleResult single_scale(const KernelOperator& T, const Cube& q, const GridFunction& f,
                               const GridFunction& g, double eps, double eps_mvee = 1e-6,
                               TQCache* tq_cache = nullptr);

struct DominationReport {
    SparseFamily family;
    double eps = 0.0;
    double eps_n = 0.0; // n * eps
    double C_n = 0.0;   // max per-cube measured constant
    double scalar_c_max = 0.0;
    double lhs = 0.0;               // |t(f,g)|
    double sparse_form_value = 0.0; // sum |S| <<f>>_{avL1(3S)} . <<g>>_{avL1(S)}
    double verdict_ratio = 0.0;     // lhs / (C_n * sparse_form)
    double telescoping_error = 0.0;
    double max_sandwich_ratio = 1.0;
    double leaf_bound_ratio = 0.0; // worst |t_Q| over the terminal bound
    bool all_dots_exact = true;
    bool ok = false;
    int degenerate_cubes = 0;

    struct CubeRow {
        Cube cube;
        double c_hat = 0.0;
        double dot_value = 0.0;
        double residual_signed = 0.0;
        int exceptional_count = 0;
    };
    std::vector<CubeRow> rows;
};

// Global domination: runs the single-scale step down the cube tree from the
// torus root, assembling a (1 - n eps)-sparse family S and verifying
// |t(f,g)| <= C_n sum_{S} |S| <<f>>_{avL1(3S)} . <<g>>_{avL1(S)}.
DominationReport cbd_pipeline(const KernelOperator& T, const GridFunction& f, const GridFunction& g, double eps,
                              double eps_mvee = 1e-6);

struct LtildeResult {
    double norm = 0.0;
    double a2 = 0.0;
    double ainf_w = 0.0;
    double ainf_v = 0.0;
    double ratio = 0.0; // norm / sqrt(a2 * ainf_w * ainf_v)
};

// L~ h(x) = sum_{Q in S} 1_Q(x) avg_{3Q} |V^{1/2}(x) W^{1/2}(y)| h(y) dy,
// assembled densely; exact L^2 -> L^2 norm.
LtildeResult ltilde_opnorm(const SparseFamily& S, const MatrixWeight& W, const MatrixWeight& V,
                           int ainfty_dirs = 64);

struct WeightedNormResult {
    double lower = 0.0; // certified lower bound; exact in the Hilbert case
    bool exact = false;
    double a2 = 0.0;
    double ratio = 0.0; // lower / a2^{3/2}
};

// Norm of T on L^2(W;E^n) via the conjugated operator W^{1/2} T W^{-1/2}.
// Exact (singular values) for E = l^2; dual-pair ascent lower bound otherwise.
WeightedNormResult weighted_opnorm_bounds(const KernelOperator& T, const MatrixWeight& W, int m = 1,
                                          double r = 2.0);

} // namespace cbd
