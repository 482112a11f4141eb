// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Tolerances are pinned in code; nothing is calibrated at runtime.

#include "cbd/commutators.hpp"
#include "cbd/domination.hpp"
#include "cbd/john.hpp"
#include "cbd/sampling.hpp"
#include "cbd/sparse.hpp"
#include "cbd/weights.hpp"

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

using namespace cbd;

namespace {

struct Outcome {
    std::string name;
    bool pass;
    std::string detail;
    double seconds;
};

std::vector<Outcome> g_results;

class Timer {
public:
    Timer() : start_(std::chrono::steady_clock::now()) {}
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_;
};

void record(const std::string& name, bool pass, const std::string& detail, double seconds) {
    g_results.push_back({name, pass, detail, seconds});
    std::printf("%s  %-34s %s  [%.1fs]\n", pass ? "PASS" : "FAIL", name.c_str(), detail.c_str(), seconds);
    std::fflush(stdout);
}

std::string fmt(const char* format, ...) {
    char buf[256];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// 1. Rounding-ellipsoid sandwich over a 720-direction net.
void criterion_john_sandwich() {
    Timer timer;
    DyadicGrid grid(1, 3);
    Rng rng(20240001);
    double worst_upper = 0.0;
    double worst_lower = 1.0;
    int bodies = 0;
    for (int trial = 0; trial < 210; ++trial) {
        const int n = 1 + trial % 3;
        const int atoms = 5 + trial % 8;
        Eigen::MatrixXd vals(atoms, n);
        for (int a = 0; a < atoms; ++a)
            for (int i = 0; i < n; ++i) vals(a, i) = rng.normal();
        const ConvexBody k(n, 1, 1.0, 2.0, vals, Eigen::VectorXd::Constant(atoms, 1.0 / atoms));
        const MveeResult mv = mvee(k, 1e-6, 720);
        if (mv.ellipsoid.rank < n) continue; // not a sandwich instance
        ++bodies;
        for (const auto& u : direction_net(n, 720)) {
            const double hk = k.support(u);
            const double he = mv.ellipsoid.support(u);
            if (he <= 0.0) continue;
            worst_upper = std::max(worst_upper, hk / he / std::sqrt(static_cast<double>(n)));
            worst_lower = std::min(worst_lower, hk / he);
        }
    }
    const bool pass = bodies >= 200 && worst_upper <= 1.0 + 1e-5 && worst_lower >= 1.0 - 1e-9 &&
                      timer.seconds() < 30.0;
    record("john_sandwich", pass,
           fmt("bodies=%d worst_upper/sqrt(n)=%.9f worst_lower=%.12f", bodies, worst_upper, worst_lower),
           timer.seconds());
}

// 2. Rounded coordinate products against the dot product, exact-dot regime.
void criterion_coordinate_products() {
    Timer timer;
    DyadicGrid grid(1, 4);
    Rng rng(20240002);
    int violations = 0;
    double worst = 0.0;
    int instances = 0;
    while (instances < 100) {
        const int n = 1 + instances % 2;
        GridFunction f = random_gaussian_function(grid, n, 1, 2.0, rng);
        GridFunction g = random_gaussian_function(grid, n, 1, 2.0, rng);
        const ConvexBody kf = body_avLp(f, grid.root(), 1.0);
        const ConvexBody kg = body_avLp(g, grid.root(), 1.0);
        const MveeResult mv = mvee(kf, 1e-6);
        if (mv.ellipsoid.rank < n) continue;
        ++instances;
        const RoundingMap map = round_transform(mv.ellipsoid);
        const GridFunction frot = f.outer_transform(map.forward);
        const GridFunction grot = g.outer_transform(map.inverse_t);
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            sum += local_norm(frot, i, grid.root(), 1.0) * local_norm(grot, i, grid.root(), 1.0);
        const DotResult d = dot(kf, kg);
        const double bound = std::pow(static_cast<double>(n), 1.5) * (1.0 + 1e-5) * d.value;
        if (!d.exact || sum > bound + 1e-12) ++violations;
        if (d.value > 0) worst = std::max(worst, sum / (std::pow(static_cast<double>(n), 1.5) * d.value));
    }
    record("rounded_coordinate_products", violations == 0,
           fmt("instances=%d violations=%d worst_ratio=%.9f", instances, violations, worst), timer.seconds());
}

// 3. End-to-end domination with the periodic Hilbert kernel at L = 8.
void criterion_domination_end_to_end() {
    Timer timer;
    DyadicGrid grid(1, 8);
    const KernelOperator t = KernelOperator::hilbert_periodic(grid);
    const double eps = 0.05;
    int violations = 0;
    double worst_c_ratio = 0.0;
    double worst_verdict = 0.0;
    for (int seed = 1; seed <= 20; ++seed) {
        double c_by_n[3] = {0.0, 0.0, 0.0};
        for (int n : {1, 2}) {
            Rng rng(202400030ULL + static_cast<std::uint64_t>(seed));
            GridFunction f = random_uniform_function(grid, n, 1, 2.0, rng, 0.5, 1.5);
            GridFunction g = random_uniform_function(grid, n, 1, 2.0, rng, 0.5, 1.5);
            const DominationReport rep = cbd_pipeline(t, f, g, eps);
            const SparseCheck check = verify_sparse(rep.family);
            if (!check.ok || check.min_ratio < 1.0 - n * eps - 1e-12) ++violations;
            if (rep.lhs > rep.C_n * rep.sparse_form_value * (1.0 + 1e-9)) ++violations;
            if (rep.telescoping_error > 1e-10 * std::max(1.0, rep.lhs)) ++violations;
            worst_verdict = std::max(worst_verdict, rep.verdict_ratio);
            c_by_n[n] = rep.C_n;
        }
        if (c_by_n[1] > 0) worst_c_ratio = std::max(worst_c_ratio, c_by_n[2] / c_by_n[1]);
    }
    const double c_bound = std::pow(2.0, 1.5) * 1.5;
    const bool pass = violations == 0 && worst_c_ratio <= c_bound && timer.seconds() < 300.0;
    record("domination_end_to_end", pass,
           fmt("violations=%d worst_C2/C1=%.3f (bound %.3f) worst_verdict=%.3f", violations, worst_c_ratio,
               c_bound, worst_verdict),
           timer.seconds());
}

// 4. Two-sided equivalence of sparse forms and the pair maximal function.
void criterion_equivalence() {
    Timer timer;
    DyadicGrid grid(1, 6);
    int violations = 0;
    double worst_easy = 0.0, worst_hard = 0.0;
    const std::vector<std::pair<double, double>> pqs{{1.0, 1.0}, {2.0, 2.0}, {1.0, 2.0}};
    for (const auto& [p, q] : pqs) {
        for (int n : {1, 2}) {
            for (int seed = 0; seed < 50; ++seed) {
                Rng rng(202400040ULL + static_cast<std::uint64_t>(seed) * 7919ULL +
                        static_cast<std::uint64_t>(n * 100 + static_cast<int>(10 * p + q)));
                GridFunction f = random_gaussian_function(grid, n, 1, 2.0, rng);
                GridFunction g = random_gaussian_function(grid, n, 1, 2.0, rng);
                for (int s = 0; s < 2; ++s)
                    for (int i = 0; i < n; ++i) f.at(rng.uniform_int(0, grid.cells() - 1), i) *= 30.0;
                const PairFormConfig cfg = PairFormConfig::defaults(n, p, q, 0.5);
                const EquivalenceReport rep = equivalence_report(f, g, cfg);
                if (!rep.easy_ok || !rep.hard_ok || !rep.family_sparse_ok) ++violations;
                worst_easy = std::max(worst_easy, rep.easy_ratio);
                worst_hard = std::max(worst_hard, rep.hard_ratio);
            }
        }
    }
    record("pair_form_equivalence", violations == 0,
           fmt("violations=%d worst_easy=%.3f worst_hard=%.3f", violations, worst_easy, worst_hard),
           timer.seconds());
}

// 5. Disjoint power sums and threshold-selected measure decay, exact regime.
void criterion_stopping_inequalities() {
    Timer timer;
    DyadicGrid grid(1, 5);
    int disjoint_violations = 0, mass_violations = 0;
    double worst_disjoint = 0.0, worst_mass = 0.0;
    const std::vector<std::pair<double, double>> pqs{{1.0, 1.0}, {2.0, 2.0}, {1.0, 2.0}};
    Rng rng(20240005);
    for (int trial = 0; trial < 200; ++trial) {
        const auto [p, q] = pqs[static_cast<std::size_t>(trial % 3)];
        const int n = 1 + trial % 2;
        GridFunction f = random_gaussian_function(grid, n, 1, 2.0, rng);
        GridFunction g = random_gaussian_function(grid, n, 1, 2.0, rng);
        const int lev = rng.uniform_int(0, 2);
        const Cube q0{lev, rng.uniform_int(0, (1 << lev) - 1), 0};
        const auto anti = random_antichain(grid, q0, rng);
        const DisjointSumCheck dsc = disjoint_sum_check(f, g, q0, anti, p, q);
        if (!dsc.ok || !dsc.exact) ++disjoint_violations;
        if (dsc.rhs > 0) worst_disjoint = std::max(worst_disjoint, dsc.lhs / dsc.rhs);

        PairBodyCache cache(f, g, p, q);
        const double a = 1.5 + 5.0 * rng.uniform();
        const StoppingMassCheck smc = stopping_mass_check(cache, q0, a, n);
        if (!smc.ok) ++mass_violations;
        if (smc.bound > 0) worst_mass = std::max(worst_mass, smc.selected_measure / smc.bound);
    }
    record("stopping_inequalities", disjoint_violations == 0 && mass_violations == 0,
           fmt("disjoint_violations=%d mass_violations=%d worst=%.3f/%.3f", disjoint_violations, mass_violations,
               worst_disjoint, worst_mass),
           timer.seconds());
}

// 6. Elementary power-difference inequality and its integrated form.
void criterion_power_difference() {
    Timer timer;
    Rng rng(20240006);
    double worst = 0.0;
    const int pointwise_violations = elementary_inequality_violations(100000, rng, &worst);

    DyadicGrid grid(1, 5);
    int integrated_violations = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::VectorXd b = random_bmo_symbol(grid, rng);
        const double alpha = 0.8 * rng.uniform();
        const double beta = std::min(1.0 - alpha, 0.8 * rng.uniform());
        const double p = 1.0 + 2.0 * rng.uniform();
        const PowerCheckReport rep = bmo_power_check(grid, b, alpha, beta, p);
        if (!rep.cellwise_ok || !rep.integrated_ok) ++integrated_violations;
    }
    record("power_difference_bounds", pointwise_violations == 0 && integrated_violations == 0,
           fmt("pointwise_violations=%d integrated_violations=%d worst=%.9f", pointwise_violations,
               integrated_violations, worst),
           timer.seconds());
}

// 7. Mixed-symbol oscillation bound A_s <= 2 (T_s + S_s).
void criterion_mixed_oscillation() {
    Timer timer;
    DyadicGrid grid(1, 5);
    Rng rng(20240007);
    int violations = 0;
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double s = trial % 2 ? 3.0 : 4.0;
        const SymbolPair pair = build_mixed(random_bmo_symbol(grid, rng), random_smooth_symbol(grid, rng));
        const AstReport rep = a_st_constants(grid, pair, s, s);
        const double bound = 2.0 * (rep.T_s + rep.S_s);
        if (rep.A_st > bound + 1e-10 * std::max(1.0, bound)) ++violations;
        if (bound > 0) worst = std::max(worst, rep.A_st / bound);
    }
    record("mixed_oscillation_bound", violations == 0, fmt("violations=%d worst_ratio=%.6f", violations, worst),
           timer.seconds());
}

// 8. Weight batteries: the factor-4 bound and refinement stability of the
// sparse operator norm ratio.
void criterion_weight_consistency() {
    Timer timer;
    DyadicGrid grid(1, 7);
    std::vector<MatrixWeight> battery;
    for (int n = 1; n <= 3; ++n) battery.push_back(identity_weight(grid, n));
    for (double alpha : {-0.6, -0.4, -0.2, 0.2, 0.4, 0.6, 0.8})
        battery.push_back(scalar_to_matrix(grid, scalar_power_weight(grid, alpha)));
    battery.push_back(diagonal_weight(grid, {scalar_power_weight(grid, 0.3), scalar_power_weight(grid, -0.3)}));
    battery.push_back(diagonal_weight(grid, {scalar_power_weight(grid, 0.5), scalar_power_weight(grid, 0.2)}));
    for (double swirl : {1.0, 2.0}) {
        Eigen::VectorXd theta(grid.cells());
        for (int c = 0; c < grid.cells(); ++c) theta[c] = swirl * 6.283185307179586 * grid.cell_midpoint(c, 0);
        battery.push_back(bloom_rotated_weight(
            grid, theta, {scalar_power_weight(grid, 0.3), scalar_power_weight(grid, -0.3)}));
    }
    for (int s = 0; s < 12; ++s) battery.push_back(random_logsmooth_weight(grid, 2, 424200 + s));
    for (int s = 0; s < 6; ++s) battery.push_back(random_logsmooth_weight(grid, 3, 434300 + s));

    int violations = 0;
    double worst = 0.0;
    for (const MatrixWeight& w : battery) {
        const double a2 = a2_characteristic(w).value;
        const double ainf = ainfty_matrix(w, 64);
        if (ainf > 4.0 * a2 * (1.0 + 1e-9)) ++violations;
        worst = std::max(worst, ainf / (4.0 * a2));
    }

    // sparse operator norm ratio across refinement for the power-weight battery
    bool stable = true;
    double worst_spread = 0.0;
    for (double alpha : {0.2, 0.4, 0.6}) {
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (int L = 6; L <= 9; ++L) {
            DyadicGrid g(1, L);
            const MatrixWeight W = scalar_to_matrix(g, scalar_power_weight(g, alpha));
            GridFunction spike(g, 1);
            spike.at(0, 0) = static_cast<double>(g.cells());
            GridFunction ones(g, 1);
            for (int c = 0; c < g.cells(); ++c) ones.at(c, 0) = 1.0;
            PairBodyCache cache(spike, ones, 1.0, 1.0);
            const SparseFamily fam = stopping_family(cache, PairFormConfig::defaults(1, 1.0, 1.0));
            const LtildeResult lt = ltilde_opnorm(fam, W, W.inverse(), 64);
            if (!std::isfinite(lt.ratio) || lt.ratio <= 0.0) stable = false;
            lo = std::min(lo, lt.ratio);
            hi = std::max(hi, lt.ratio);
        }
        worst_spread = std::max(worst_spread, hi / lo);
        if (hi > 2.0 * lo) stable = false;
    }
    record("weight_consistency", violations == 0 && static_cast<int>(battery.size()) >= 30 && stable,
           fmt("battery=%zu violations=%d worst_ainf/(4a2)=%.3f ltilde_spread=%.3f", battery.size(), violations,
               worst, worst_spread),
           timer.seconds());
}

// 9. Weighted operator norm trend across the power-weight family.
void criterion_weighted_norm_trend() {
    Timer timer;
    DyadicGrid grid(1, 8);
    const KernelOperator t = KernelOperator::hilbert_periodic(grid);
    bool monotone = true;
    bool bounded = true;
    double prev_norm = 0.0, prev_a2 = 0.0, max_ratio = 0.0;
    for (double alpha : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        const MatrixWeight w = scalar_to_matrix(grid, scalar_power_weight(grid, alpha));
        const WeightedNormResult res = weighted_opnorm_bounds(t, w, 2, 2.0);
        if (!res.exact || !std::isfinite(res.ratio)) bounded = false;
        if (res.lower < prev_norm - 1e-9 || res.a2 < prev_a2 - 1e-12) monotone = false;
        max_ratio = std::max(max_ratio, res.ratio);
        prev_norm = res.lower;
        prev_a2 = res.a2;
    }
    record("weighted_norm_trend", monotone && bounded,
           fmt("monotone=%d ratio_constant=%.6f", monotone ? 1 : 0, max_ratio), timer.seconds());
}

// 10. Bilinear-form algebra and the classical commutator two-path identity.
void criterion_algebraic_identities() {
    Timer timer;
    DyadicGrid grid(1, 6);
    const KernelOperator t = KernelOperator::hilbert_periodic(grid);
    Rng rng(20240010);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 2;
        GridFunction f = random_gaussian_function(grid, n, 1, 2.0, rng);
        GridFunction g = random_gaussian_function(grid, n, 1, 2.0, rng);
        const double base = bilinear_form(t, f, g);
        Eigen::MatrixXd a(n, n);
        for (int i = 0; i < n * n; ++i) a(i / n, i % n) = rng.normal();
        const Eigen::MatrixXd u = Eigen::HouseholderQR<Eigen::MatrixXd>(a).householderQ();
        double rotated = 0.0;
        for (int i = 0; i < n; ++i)
            rotated += bilinear_form(t, f.outer_transform(u.col(i).transpose()),
                                     g.outer_transform(u.col(i).transpose()));
        worst = std::max(worst, std::abs(rotated - base) / std::max(1.0, std::abs(base)));

        Eigen::MatrixXd r(n, n);
        for (int i = 0; i < n * n; ++i) r(i / n, i % n) = rng.normal();
        const double lhs = bilinear_form(t, f.outer_transform(r), g);
        const double rhs = bilinear_form(t, f, g.outer_transform(r.transpose()));
        worst = std::max(worst, std::abs(lhs - rhs) / std::max(1.0, std::abs(lhs)));

        const Eigen::VectorXd b = random_smooth_symbol(grid, rng);
        Eigen::VectorXd h(grid.cells());
        for (int c = 0; c < grid.cells(); ++c) h[c] = rng.normal();
        const Eigen::VectorXd via = apply_generalized(t, build_classical(b), h);
        const Eigen::VectorXd tf = grid.cell_measure() * (t.kernel() * h);
        const Eigen::VectorXd tbf = grid.cell_measure() * (t.kernel() * b.cwiseProduct(h));
        const Eigen::VectorXd direct = b.cwiseProduct(tf) - tbf;
        worst = std::max(worst, (via - direct).cwiseAbs().maxCoeff());
    }
    record("algebraic_identities", worst <= 1e-12, fmt("worst_residual=%.3e", worst), timer.seconds());
}

} // namespace

int main() {
    criterion_john_sandwich();
    criterion_coordinate_products();
    criterion_domination_end_to_end();
    criterion_equivalence();
    criterion_stopping_inequalities();
    criterion_power_difference();
    criterion_mixed_oscillation();
    criterion_weight_consistency();
    criterion_weighted_norm_trend();
    criterion_algebraic_identities();

    int failures = 0;
    for (const auto& r : g_results)
        if (!r.pass) ++failures;
    std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(g_results.size()) - failures,
                g_results.size());
    return failures == 0 ? 0 : 1;
}
