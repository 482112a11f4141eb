#include "cbd/suites.hpp"

#include "cbd/commutators.hpp"
#include "cbd/domination.hpp"
#include "cbd/john.hpp"
#include "cbd/sampling.hpp"
#include "cbd/weights.hpp"

#include <cmath>
#include <sstream>

namespace cbd {

namespace {

nlohmann::json cube_to_json(const Cube& c) {
    return {{"level", c.level}, {"ix", c.ix}, {"iy", c.iy}};
}

// witness cells compressed into [start, end) runs
nlohmann::json cell_ranges(const std::vector<int>& cells) {
    nlohmann::json out = nlohmann::json::array();
    std::size_t i = 0;
    while (i < cells.size()) {
        int start = cells[i];
        int end = start + 1;
        while (i + 1 < cells.size() && cells[i + 1] == end) {
            ++end;
            ++i;
        }
        out.push_back({start, end});
        ++i;
    }
    return out;
}

} // namespace

nlohmann::json family_to_json(const SparseFamily& fam) {
    nlohmann::json members = nlohmann::json::array();
    for (const auto& m : fam.members) {
        members.push_back({{"cube", cube_to_json(m.cube)},
                           {"witness_ranges", cell_ranges(m.witness)},
                           {"a", json_num(m.a_value)}});
    }
    return {{"eta", fam.eta}, {"provenance", fam.provenance}, {"members", members}};
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    return {{"grid", {{"d", cfg.d}, {"L", cfg.L}}},
            {"value", {{"n", cfg.n}, {"m", cfg.m}, {"r", json_num(cfg.r)}}},
            {"operator", {{"kind", cfg.kernel}, {"c", cfg.kernel_c}, {"delta_mod", cfg.kernel_delta}}},
            {"dominate", {{"epsilon", cfg.epsilon}, {"eps_mvee", cfg.eps_mvee}}},
            {"equivalence",
             {{"p", cfg.eq_p}, {"q", cfg.eq_q}, {"delta", cfg.eq_delta}, {"seeds", cfg.eq_seeds}}},
            {"weights", {{"direction_count", cfg.weight_directions}}},
            {"commutator",
             {{"kind", cfg.commutator_kind},
              {"s", cfg.comm_s},
              {"t", cfg.comm_t},
              {"p", cfg.comm_p},
              {"k", cfg.comm_k}}},
            {"run", {{"seed", cfg.seed}}}};
}

SuiteResult suite_dominate(const ExperimentConfig& cfg) {
    SuiteResult out;
    DyadicGrid grid(1, cfg.L);
    const KernelOperator T = KernelOperator::make(grid, cfg.kernel, cfg.kernel_c, cfg.kernel_delta);
    Rng rng(cfg.seed);
    const GridFunction f = random_uniform_function(grid, cfg.n, cfg.m, cfg.r, rng, 0.5, 1.5);
    const GridFunction g = random_uniform_function(grid, cfg.n, cfg.m, dual_exponent(cfg.r), rng, 0.5, 1.5);

    const DominationReport rep = cbd_pipeline(T, f, g, cfg.epsilon, cfg.eps_mvee);
    const SparseCheck check = verify_sparse(rep.family);

    out.checks.push_back(CheckRow::leq("dominate.bilinear_le_constant_times_sparse_form", rep.lhs,
                                       rep.C_n * rep.sparse_form_value));
    out.checks.push_back(CheckRow::leq("dominate.family_eta_ge_target", 1.0 - cfg.n * cfg.epsilon, check.min_ratio));
    out.checks.push_back(
        CheckRow::leq("dominate.telescoping_identity", rep.telescoping_error, 1e-10 * std::max(1.0, rep.lhs)));
    out.checks.push_back(CheckRow::leq("dominate.terminal_cube_bound", rep.leaf_bound_ratio, 1.0));

    out.details = {{"C_n", json_num(rep.C_n)},
                   {"scalar_c_max", json_num(rep.scalar_c_max)},
                   {"lhs", json_num(rep.lhs)},
                   {"sparse_form", json_num(rep.sparse_form_value)},
                   {"verdict_ratio", json_num(rep.verdict_ratio)},
                   {"max_sandwich_ratio", json_num(rep.max_sandwich_ratio)},
                   {"cube_count", static_cast<int>(rep.family.members.size())},
                   {"degenerate_cubes", rep.degenerate_cubes},
                   {"all_dots_exact", rep.all_dots_exact},
                   {"family", family_to_json(rep.family)}};
    return out;
}

SuiteResult suite_equivalence(const ExperimentConfig& cfg) {
    SuiteResult out;
    DyadicGrid grid(1, cfg.L);
    double worst_easy = 0.0, worst_hard = 0.0, worst_eta = 1.0;
    bool all_sparse = true;
    nlohmann::json seeds = nlohmann::json::array();
    for (int s = 0; s < cfg.eq_seeds; ++s) {
        Rng rng(cfg.seed + static_cast<std::uint64_t>(s) * 0x9E37ULL);
        const GridFunction f = random_gaussian_function(grid, cfg.n, 1, 2.0, rng);
        const GridFunction g = random_gaussian_function(grid, cfg.n, 1, 2.0, rng);
        const PairFormConfig pcfg = PairFormConfig::defaults(cfg.n, cfg.eq_p, cfg.eq_q, cfg.eq_delta);
        const EquivalenceReport rep = equivalence_report(f, g, pcfg);
        worst_easy = std::max(worst_easy, rep.easy_ratio);
        worst_hard = std::max(worst_hard, rep.hard_ratio);
        worst_eta = std::min(worst_eta, rep.family_eta);
        all_sparse = all_sparse && rep.family_sparse_ok;
        seeds.push_back({{"sparse_value", json_num(rep.sparse_value)},
                         {"maximal_value", json_num(rep.maximal_value)},
                         {"easy_ratio", json_num(rep.easy_ratio)},
                         {"hard_ratio", json_num(rep.hard_ratio)},
                         {"family_size", rep.family_size},
                         {"dots_exact", rep.dots_exact}});
    }
    out.checks.push_back(CheckRow::leq("equivalence.easy_direction_inv_delta", worst_easy, 1.0));
    out.checks.push_back(CheckRow::leq("equivalence.hard_direction_A", worst_hard, 1.0));
    out.checks.push_back(CheckRow::leq("equivalence.family_eta_ge_delta", cfg.eq_delta, worst_eta));
    out.details = {{"seeds", seeds}, {"all_families_sparse", all_sparse}};
    return out;
}

SuiteResult suite_weights(const ExperimentConfig& cfg) {
    SuiteResult out;
    DyadicGrid grid(1, cfg.L);
    struct Entry {
        std::string name;
        MatrixWeight w;
    };
    std::vector<Entry> battery;
    for (int n = 1; n <= 3; ++n) battery.push_back({"identity_n" + std::to_string(n), identity_weight(grid, n)});
    for (double alpha : {-0.6, -0.4, -0.2, 0.2, 0.4, 0.6, 0.8}) {
        std::ostringstream name;
        name << "scalar_power_" << alpha;
        battery.push_back({name.str(), scalar_to_matrix(grid, scalar_power_weight(grid, alpha))});
    }
    battery.push_back({"diagonal_power_a",
                       diagonal_weight(grid, {scalar_power_weight(grid, 0.3), scalar_power_weight(grid, -0.3)})});
    battery.push_back({"diagonal_power_b",
                       diagonal_weight(grid, {scalar_power_weight(grid, 0.5), scalar_power_weight(grid, 0.2)})});
    for (double swirl : {1.0, 2.0}) {
        Eigen::VectorXd theta(grid.cells());
        for (int c = 0; c < grid.cells(); ++c)
            theta[c] = swirl * 6.283185307179586 * grid.cell_midpoint(c, 0);
        std::ostringstream name;
        name << "bloom_rotated_swirl" << swirl;
        battery.push_back({name.str(), bloom_rotated_weight(grid, theta,
                                                            {scalar_power_weight(grid, 0.3),
                                                             scalar_power_weight(grid, -0.3)})});
    }
    for (int s = 0; s < 10; ++s)
        battery.push_back({"logsmooth_n2_s" + std::to_string(s),
                           random_logsmooth_weight(grid, 2, cfg.seed + static_cast<std::uint64_t>(s))});
    for (int s = 0; s < 6; ++s)
        battery.push_back({"logsmooth_n3_s" + std::to_string(s),
                           random_logsmooth_weight(grid, 3, cfg.seed + 100 + static_cast<std::uint64_t>(s))});

    double worst_factor = 0.0; // ainfty / (4 a2)
    double min_a2 = std::numeric_limits<double>::infinity();
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& e : battery) {
        const double a2 = a2_characteristic(e.w).value;
        const double ainf = ainfty_matrix(e.w, std::max(cfg.weight_directions, 2 * e.w.n()));
        worst_factor = std::max(worst_factor, ainf / (4.0 * a2));
        min_a2 = std::min(min_a2, a2);
        rows.push_back({{"name", e.name}, {"a2", json_num(a2)}, {"ainfty_sampled", json_num(ainf)}});
    }
    out.checks.push_back(CheckRow::leq("weights.ainfty_le_4_a2", worst_factor, 1.0));
    out.checks.push_back(CheckRow::leq("weights.a2_ge_1", 1.0, min_a2));

    // Sparse-operator norm against the characteristics for a power weight.
    const Eigen::VectorXd w = scalar_power_weight(grid, 0.4);
    const MatrixWeight W = scalar_to_matrix(grid, w);
    const MatrixWeight V = W.inverse();
    GridFunction spike(grid, 1, 1, 2.0);
    spike.at(0, 0) = static_cast<double>(grid.cells());
    GridFunction ones(grid, 1, 1, 2.0);
    for (int c = 0; c < grid.cells(); ++c) ones.at(c, 0) = 1.0;
    PairBodyCache cache(spike, ones, 1.0, 1.0);
    const SparseFamily fam = stopping_family(cache, PairFormConfig::defaults(1, 1.0, 1.0, 0.5));
    const LtildeResult lt = ltilde_opnorm(fam, W, V, cfg.weight_directions);
    out.checks.push_back(CheckRow::leq("ltilde.norm_finite", lt.norm, 1e300));
    out.details = {{"battery", rows},
                   {"ltilde",
                    {{"norm", json_num(lt.norm)},
                     {"a2", json_num(lt.a2)},
                     {"ainf_w", json_num(lt.ainf_w)},
                     {"ainf_v", json_num(lt.ainf_v)},
                     {"ratio", json_num(lt.ratio)},
                     {"family_size", static_cast<int>(fam.members.size())}}}};
    return out;
}

SuiteResult suite_commutator(const ExperimentConfig& cfg) {
    SuiteResult out;
    DyadicGrid grid(1, cfg.L);
    const KernelOperator T = KernelOperator::make(grid, cfg.kernel, cfg.kernel_c, cfg.kernel_delta);
    Rng rng(cfg.seed);

    SymbolPair pair;
    if (cfg.commutator_kind == "classical") {
        pair = build_classical(random_bmo_symbol(grid, rng));
    } else if (cfg.commutator_kind == "iterated") {
        pair = build_iterated(random_smooth_symbol(grid, rng), cfg.comm_k);
    } else {
        pair = build_mixed(random_smooth_symbol(grid, rng), random_smooth_symbol(grid, rng));
    }

    // defining kernel identity of the kind, cellwise over all pairs
    double worst_identity = 0.0;
    for (int x = 0; x < grid.cells(); ++x)
        for (int y = 0; y < grid.cells(); ++y) {
            double expected = 0.0;
            if (pair.kind == SymbolPair::Kind::classical) expected = pair.base[0][x] - pair.base[0][y];
            else if (pair.kind == SymbolPair::Kind::iterated)
                expected = std::pow(pair.base[0][x] - pair.base[0][y], pair.order);
            else expected = (pair.base[0][x] - pair.base[0][y]) * (pair.base[1][x] - pair.base[1][y]);
            worst_identity = std::max(worst_identity, std::abs(pair.pair_kernel(x, y) - expected));
        }
    out.checks.push_back(CheckRow::leq("commutator.defining_identity", worst_identity, 1e-9));

    const CommutatorReport rep = lp_commutator_report(T, pair, cfg.comm_s, cfg.comm_t, cfg.comm_p, cfg.epsilon);
    out.checks.push_back(CheckRow::leq("commutator.lp_lower_le_sparse_route_upper", rep.lp_lower, rep.lp_upper));
    if (pair.kind == SymbolPair::Kind::mixed)
        out.checks.push_back(CheckRow::leq("commutator.mixed_As_le_2TS", rep.constants.A_st,
                                           2.0 * (rep.constants.T_s + rep.constants.S_s)));

    Rng erng(cfg.seed ^ 0x5151ULL);
    double worst_elem = 0.0;
    const int violations = elementary_inequality_violations(10000, erng, &worst_elem);
    out.checks.push_back(CheckRow::leq("commutator.power_diff_elementary", static_cast<double>(violations), 0.0));

    nlohmann::json bmo = nlohmann::json::array();
    for (double b : rep.constants.bmo) bmo.push_back(json_num(b));
    out.details = {{"A_st", json_num(rep.constants.A_st)},
                   {"A_st_triple", json_num(rep.constants.A_st_triple)},
                   {"S_s", json_num(rep.constants.S_s)},
                   {"T_s", json_num(rep.constants.T_s)},
                   {"bmo", bmo},
                   {"lp_lower", json_num(rep.lp_lower)},
                   {"lower_exact", rep.lower_exact},
                   {"lp_upper", json_num(rep.lp_upper)},
                   {"pipeline_C", json_num(rep.pipeline_C)},
                   {"elementary_worst_margin", json_num(worst_elem)}};
    return out;
}

SuiteResult suite_verify(const ExperimentConfig& cfg) {
    SuiteResult out;
    Rng rng(cfg.seed ^ 0xC0DEULL);

    // grid: partition additivity and the avL vs L scaling identity
    {
        DyadicGrid grid(1, 6);
        double worst_partition = 0.0;
        for (const Cube& q : grid.all_cubes()) {
            if (q.level == grid.depth()) continue;
            double sum = 0.0;
            for (const Cube& c : grid.children(q)) sum += grid.measure(c);
            worst_partition = std::max(worst_partition, std::abs(sum - grid.measure(q)));
        }
        out.checks.push_back(CheckRow::leq("grid.partition_additivity", worst_partition, 0.0, 0.0));

        const GridFunction f = random_gaussian_function(grid, 1, 1, 2.0, rng);
        double worst_scale = 0.0;
        for (double p : {1.0, 2.0, 3.0}) {
            for (const Cube& q : {grid.root(), Cube{2, 1, 0}, Cube{4, 7, 0}}) {
                double lp = 0.0;
                for (int c : grid.cells_of(q)) lp += grid.cell_measure() * std::pow(std::abs(f.at(c, 0)), p);
                lp = std::pow(lp, 1.0 / p);
                const double avl = local_norm(f, q, p) * std::pow(grid.measure(q), 1.0 / p);
                worst_scale = std::max(worst_scale, std::abs(lp - avl) / std::max(1.0, lp));
            }
        }
        out.checks.push_back(CheckRow::leq("grid.avl_vs_l_scaling", worst_scale, 1e-12));
    }

    // bodies: support function properties and the sign-enumeration oracle
    {
        DyadicGrid grid(1, 3);
        double worst_sub = 0.0, worst_hom = 0.0, worst_oracle = 0.0;
        for (int trial = 0; trial < 20; ++trial) {
            const GridFunction f = random_gaussian_function(grid, 2, 1, 2.0, rng);
            const ConvexBody K = body_avLp(f, grid.root(), 1.0);
            for (int k = 0; k < 10; ++k) {
                Eigen::VectorXd u(2), v(2);
                u << rng.normal(), rng.normal();
                v << rng.normal(), rng.normal();
                worst_sub = std::max(worst_sub, K.support(u + v) - K.support(u) - K.support(v));
                worst_hom = std::max(worst_hom, std::abs(K.support(2.0 * u) - 2.0 * K.support(u)));
            }
            const GridFunction g = random_gaussian_function(grid, 2, 1, 2.0, rng);
            const ConvexBody B = body_avLp(g, grid.root(), 1.0);
            const DotResult d = dot(K, B);
            const double oracle = dot_exhaustive_signs(K, B);
            worst_oracle = std::max(worst_oracle, std::abs(d.value - oracle) / std::max(1.0, oracle));
        }
        out.checks.push_back(CheckRow::leq("bodies.support_subadditive", worst_sub, 1e-12));
        out.checks.push_back(CheckRow::leq("bodies.support_homogeneous", worst_hom, 1e-12));
        out.checks.push_back(CheckRow::leq("bodies.dot_matches_sign_oracle", worst_oracle, 1e-10));
    }

    // john: sandwich on a quick random batch
    {
        DyadicGrid grid(1, 3);
        double worst_upper = 0.0, worst_lower = 0.0;
        for (int trial = 0; trial < 15; ++trial) {
            const int n = 1 + trial % 3;
            const GridFunction f = random_gaussian_function(grid, n, 1, 2.0, rng);
            const ConvexBody K = body_avLp(f, grid.root(), 1.0);
            const MveeResult mv = mvee(K, 1e-6, 180);
            for (const Eigen::VectorXd& u : direction_net(n, 180)) {
                const double hk = K.support(u);
                const double he = mv.ellipsoid.support(u);
                if (he > 0) {
                    worst_upper = std::max(worst_upper, hk / he / std::sqrt(static_cast<double>(n)));
                    worst_lower = std::max(worst_lower, he / hk);
                }
            }
        }
        out.checks.push_back(CheckRow::leq("john.outer_sandwich_sqrt_n", worst_upper, 1.0 + 1e-5));
        out.checks.push_back(CheckRow::leq("john.inner_containment", worst_lower, 1.0 + 1e-9));
    }

    // algebra: basis independence, transpose identity, commutator two-path
    {
        DyadicGrid grid(1, 5);
        const KernelOperator T = KernelOperator::hilbert_periodic(grid);
        double worst_basis = 0.0, worst_transpose = 0.0, worst_two_path = 0.0;
        for (int trial = 0; trial < 10; ++trial) {
            const GridFunction f = random_gaussian_function(grid, 2, 1, 2.0, rng);
            const GridFunction g = random_gaussian_function(grid, 2, 1, 2.0, rng);
            const double base = bilinear_form(T, f, g);
            const double angle = rng.uniform(0.0, 6.283185307179586);
            Eigen::MatrixXd U(2, 2);
            U << std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle);
            const double rotated = bilinear_form(T, f.outer_transform(U.transpose()), g.outer_transform(U.transpose()));
            worst_basis = std::max(worst_basis, std::abs(rotated - base));
            Eigen::MatrixXd R(2, 2);
            R << rng.normal(), rng.normal(), rng.normal(), rng.normal();
            worst_transpose = std::max(
                worst_transpose,
                std::abs(bilinear_form(T, f.outer_transform(R), g) -
                         bilinear_form(T, f, g.outer_transform(R.transpose()))));

            const Eigen::VectorXd b = random_smooth_symbol(grid, rng);
            const Eigen::VectorXd h = f.data().col(0);
            const SymbolPair pair = build_classical(b);
            const Eigen::VectorXd via_general = apply_generalized(T, pair, h);
            const Eigen::VectorXd tf = grid.cell_measure() * (T.kernel() * h);
            const Eigen::VectorXd tbf = grid.cell_measure() * (T.kernel() * b.cwiseProduct(h));
            const Eigen::VectorXd direct = b.cwiseProduct(tf) - tbf;
            worst_two_path = std::max(worst_two_path, (via_general - direct).cwiseAbs().maxCoeff());
        }
        out.checks.push_back(CheckRow::leq("algebra.basis_independence", worst_basis, 1e-12));
        out.checks.push_back(CheckRow::leq("algebra.transpose_identity", worst_transpose, 1e-12));
        out.checks.push_back(CheckRow::leq("commutator.classical_two_path", worst_two_path, 1e-12));
    }

    // weights: identity, the two-cell closed form, and the factor-4 bound
    {
        DyadicGrid grid(1, cfg.L >= 6 ? 6 : cfg.L);
        const double id_a2 = a2_characteristic(identity_weight(grid, 2)).value;
        out.checks.push_back(CheckRow::leq("weights.identity_a2_is_one", std::abs(id_a2 - 1.0), 1e-12));

        DyadicGrid two(1, 1);
        const double t = 4.0;
        Eigen::VectorXd w(2);
        w << 1.0, t;
        const double a2 = a2_characteristic(scalar_to_matrix(two, w)).value;
        const double closed = ((1.0 + t) / 2.0) * ((1.0 + 1.0 / t) / 2.0);
        out.checks.push_back(CheckRow::leq("weights.two_cell_closed_form", std::abs(a2 - closed), 1e-12));

        double worst = 0.0;
        for (int s = 0; s < 4; ++s) {
            const MatrixWeight W = random_logsmooth_weight(grid, 2, cfg.seed + 7 + static_cast<std::uint64_t>(s));
            worst = std::max(worst, ainfty_matrix(W, 32) / (4.0 * a2_characteristic(W).value));
        }
        out.checks.push_back(CheckRow::leq("weights.ainfty_le_4_a2", worst, 1.0));
    }

    // sparse + domination: a small end-to-end run of both pipelines
    {
        DyadicGrid grid(1, 5);
        Rng seq(cfg.seed ^ 0xE0ULL);
        const GridFunction f = random_gaussian_function(grid, 2, 1, 2.0, seq);
        const GridFunction g = random_gaussian_function(grid, 2, 1, 2.0, seq);
        const EquivalenceReport eq = equivalence_report(f, g, PairFormConfig::defaults(2, 1.0, 1.0, 0.5));
        out.checks.push_back(CheckRow::leq("equivalence.easy_direction_inv_delta", eq.easy_ratio, 1.0));
        out.checks.push_back(CheckRow::leq("equivalence.hard_direction_A", eq.hard_ratio, 1.0));

        DyadicGrid dgrid(1, 6);
        const KernelOperator T = KernelOperator::hilbert_periodic(dgrid);
        Rng drng(cfg.seed ^ 0xD0ULL);
        const GridFunction df = random_uniform_function(dgrid, 2, 1, 2.0, drng, 0.5, 1.5);
        const GridFunction dg = random_uniform_function(dgrid, 2, 1, 2.0, drng, 0.5, 1.5);
        const DominationReport rep = cbd_pipeline(T, df, dg, 0.1);
        const SparseCheck check = verify_sparse(rep.family);
        out.checks.push_back(
            CheckRow::leq("dominate.bilinear_le_constant_times_sparse_form", rep.lhs, rep.C_n * rep.sparse_form_value));
        out.checks.push_back(CheckRow::leq("dominate.family_eta_ge_target", 1.0 - 2 * 0.1, check.min_ratio));
    }

    // elementary power inequality
    {
        Rng erng(cfg.seed ^ 0xE1EULL);
        const int violations = elementary_inequality_violations(10000, erng);
        out.checks.push_back(CheckRow::leq("commutator.power_diff_elementary", static_cast<double>(violations), 0.0));
    }

    out.details = {{"note", "condensed cross-module property battery"}};
    return out;
}

nlohmann::json run_suite_json(const std::string& name, const ExperimentConfig& cfg) {
    SuiteResult res;
    if (name == "verify") res = suite_verify(cfg);
    else if (name == "dominate") res = suite_dominate(cfg);
    else if (name == "weights") res = suite_weights(cfg);
    else if (name == "commutator") res = suite_commutator(cfg);
    else if (name == "equivalence") res = suite_equivalence(cfg);
    else throw std::invalid_argument("unknown suite '" + name + "'");

    return {{"version", "cbdlab 0.1.0"},
            {"suite", name},
            {"seed", cfg.seed},
            {"config", config_to_json(cfg)},
            {"checks", checks_to_json(res.checks)},
            {"details", res.details},
            {"all_pass", all_pass(res.checks)}};
}

} // namespace cbd
