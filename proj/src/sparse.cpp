#include "cbd/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbd {

SparseCheck verify_sparse(const SparseFamily& fam) {
    SparseCheck out;
    if (!fam.grid) {
        out.what = "family has no grid";
        return out;
    }
    std::vector<int> owner(static_cast<std::size_t>(fam.grid->cells()), -1);
    double min_ratio = 1.0;
    for (std::size_t i = 0; i < fam.members.size(); ++i) {
        const auto& m = fam.members[i];
        const auto cube_cells = fam.grid->cells_of(m.cube);
        std::vector<char> inside(static_cast<std::size_t>(fam.grid->cells()), 0);
        for (int c : cube_cells) inside[static_cast<std::size_t>(c)] = 1;
        for (int c : m.witness) {
            if (!inside[static_cast<std::size_t>(c)]) {
                out.what = "witness cell outside its cube";
                out.bad_i = static_cast<int>(i);
                return out;
            }
            if (owner[static_cast<std::size_t>(c)] >= 0) {
                out.what = "overlapping witness sets";
                out.bad_i = owner[static_cast<std::size_t>(c)];
                out.bad_j = static_cast<int>(i);
                return out;
            }
            owner[static_cast<std::size_t>(c)] = static_cast<int>(i);
        }
        min_ratio = std::min(min_ratio,
                             static_cast<double>(m.witness.size()) / static_cast<double>(cube_cells.size()));
    }
    out.min_ratio = fam.members.empty() ? 1.0 : min_ratio;
    out.ok = out.min_ratio >= fam.eta - 1e-12;
    if (!out.ok) out.what = "witness ratio below declared eta";
    return out;
}

double PairFormConfig::lemma_constant() const {
    return std::pow(static_cast<double>(n), std::max(r, 1.0) + r / 2.0);
}

bool PairFormConfig::valid() const {
    if (!(p >= 1.0) || !(q >= 1.0) || !(delta > 0.0 && delta < 1.0) || A <= 1.0) return false;
    if (std::abs(1.0 / r - (1.0 / p + 1.0 / q)) > 1e-12) return false;
    return lemma_constant() / std::pow(A, r) <= 1.0 - delta + 1e-12;
}

PairFormConfig PairFormConfig::defaults(int n, double p, double q, double delta) {
    PairFormConfig cfg;
    cfg.n = n;
    cfg.p = p;
    cfg.q = q;
    cfg.delta = delta;
    cfg.r = 1.0 / (1.0 / p + 1.0 / q);
    cfg.A = std::pow(2.0 * cfg.lemma_constant() / (1.0 - delta), 1.0 / cfg.r);
    return cfg;
}

PairBodyCache::PairBodyCache(const GridFunction& f, const GridFunction& g, double p, double q)
    : f_(&f), g_(&g), p_(p), q_(q),
      memo_(static_cast<std::size_t>(f.grid().cube_count()), std::numeric_limits<double>::quiet_NaN()) {
    if (&f.grid() != &g.grid()) throw std::invalid_argument("PairBodyCache: functions on different grids");
    if (f.n() != g.n()) throw std::invalid_argument("PairBodyCache: outer dimensions differ");
}

double PairBodyCache::a(const Cube& cube) {
    const std::size_t id = static_cast<std::size_t>(grid().cube_id(cube));
    if (!std::isnan(memo_[id])) return memo_[id];
    const DotResult d = dot(body_avLp(*f_, cube, p_), body_avLp(*g_, cube, q_));
    if (!d.exact) all_exact_ = false;
    memo_[id] = d.value;
    return d.value;
}

double sparse_form(const SparseFamily& fam, PairBodyCache& cache) {
    double acc = 0.0;
    for (const auto& m : fam.members) acc += cache.grid().measure(m.cube) * cache.a(m.cube);
    return acc;
}

double sparse_form(const SparseFamily& fam, const GridFunction& f, const GridFunction& g, double p, double q) {
    PairBodyCache cache(f, g, p, q);
    return sparse_form(fam, cache);
}

double pair_maximal_l1(PairBodyCache& cache) {
    const DyadicGrid& grid = cache.grid();
    double acc = 0.0;
    for (int c = 0; c < grid.cells(); ++c) {
        double m = 0.0;
        for (int l = 0; l <= grid.depth(); ++l) m = std::max(m, cache.a(grid.ancestor(c, l)));
        acc += grid.cell_measure() * m;
    }
    return acc;
}

SparseFamily stopping_family(PairBodyCache& cache, const PairFormConfig& cfg) {
    if (!cfg.valid()) throw std::invalid_argument("stopping_family: config violates the stopping inequality");
    const DyadicGrid& grid = cache.grid();
    SparseFamily fam;
    fam.grid = &grid;
    fam.eta = cfg.delta;
    fam.provenance = "stopping_time";

    const Cube root = grid.root();
    if (cache.a(root) == 0.0) {
        // zero pair form at the root: {Q0} alone with full witness
        SparseFamily::Member member;
        member.cube = root;
        member.witness = grid.cells_of(root);
        fam.members.push_back(std::move(member));
        return fam;
    }
    std::vector<Cube> generation{root};
    while (!generation.empty()) {
        std::vector<Cube> next;
        for (const Cube& q : generation) {
            const double aq = cache.a(q);
            std::vector<Cube> stops = grid.maximal_cubes(q, [&](const Cube& c) {
                if (c == q) return false;
                return cache.a(c) > cfg.A * aq;
            });
            SparseFamily::Member member;
            member.cube = q;
            member.a_value = aq;
            std::vector<char> removed(static_cast<std::size_t>(grid.cells()), 0);
            for (const Cube& s : stops)
                for (int c : grid.cells_of(s)) removed[static_cast<std::size_t>(c)] = 1;
            for (int c : grid.cells_of(q))
                if (!removed[static_cast<std::size_t>(c)]) member.witness.push_back(c);
            fam.members.push_back(std::move(member));
            for (const Cube& s : stops) next.push_back(s);
        }
        generation = std::move(next);
    }
    return fam;
}

EquivalenceReport equivalence_report(const GridFunction& f, const GridFunction& g, const PairFormConfig& cfg) {
    PairBodyCache cache(f, g, cfg.p, cfg.q);
    EquivalenceReport rep;
    SparseFamily fam = stopping_family(cache, cfg);
    rep.family_size = static_cast<int>(fam.members.size());
    const SparseCheck check = verify_sparse(fam);
    rep.family_eta = check.min_ratio;
    rep.family_sparse_ok = check.ok;
    rep.sparse_value = sparse_form(fam, cache);
    rep.maximal_value = pair_maximal_l1(cache);
    rep.dots_exact = cache.all_exact();
    const double tol = 1e-12 * std::max(1.0, std::max(rep.sparse_value, rep.maximal_value));
    rep.easy_ok = rep.sparse_value <= rep.maximal_value / cfg.delta + tol;
    rep.hard_ok = rep.maximal_value <= cfg.A * rep.sparse_value + tol;
    rep.easy_ratio = rep.maximal_value > 0 ? rep.sparse_value / (rep.maximal_value / cfg.delta) : 0.0;
    rep.hard_ratio = rep.sparse_value > 0 ? rep.maximal_value / (cfg.A * rep.sparse_value) : 0.0;
    return rep;
}

DisjointSumCheck disjoint_sum_check(const GridFunction& f, const GridFunction& g, const Cube& q0,
                                    const std::vector<Cube>& disjoint, double p, double q) {
    DisjointSumCheck out;
    const double r = 1.0 / (1.0 / p + 1.0 / q);
    const int n = f.n();
    double lhs = 0.0;
    for (const Cube& c : disjoint) {
        const DotResult d = dot(body_Lp(f, c, p), body_Lp(g, c, q));
        if (!d.exact) out.exact = false;
        lhs += std::pow(d.value, r);
    }
    const DotResult d0 = dot(body_Lp(f, q0, p), body_Lp(g, q0, q));
    if (!d0.exact) out.exact = false;
    out.lhs = lhs;
    out.rhs = std::pow(static_cast<double>(n), std::max(r, 1.0) + r / 2.0) * std::pow(d0.value, r);
    out.ok = out.lhs <= out.rhs * (1.0 + 1e-9) + 1e-300;
    return out;
}

StoppingMassCheck stopping_mass_check(PairBodyCache& cache, const Cube& q0, double A, int n_for_bound) {
    StoppingMassCheck out;
    const DyadicGrid& grid = cache.grid();
    const double a0 = cache.a(q0);
    const std::vector<Cube> selected = grid.maximal_cubes(q0, [&](const Cube& c) {
        if (c == q0) return false;
        return cache.a(c) >= A * a0 && cache.a(c) > 0.0;
    });
    for (const Cube& c : selected) out.selected_measure += grid.measure(c);
    out.selected_count = static_cast<int>(selected.size());
    const double r = 1.0 / (1.0 / cache.p() + 1.0 / cache.q());
    out.bound = std::pow(static_cast<double>(n_for_bound), std::max(r, 1.0) + r / 2.0) / std::pow(A, r) *
                grid.measure(q0);
    out.ok = out.selected_measure <= out.bound * (1.0 + 1e-9);
    return out;
}

std::vector<Cube> random_antichain(const DyadicGrid& grid, const Cube& q0, Rng& rng, double select_prob) {
    std::vector<Cube> out;
    std::vector<Cube> stack;
    if (q0.level < grid.depth())
        for (const Cube& c : grid.children(q0)) stack.push_back(c);
    while (!stack.empty()) {
        Cube cur = stack.back();
        stack.pop_back();
        if (rng.uniform() < select_prob) {
            out.push_back(cur);
        } else if (cur.level < grid.depth()) {
            for (const Cube& c : grid.children(cur)) stack.push_back(c);
        }
    }
    return out;
}

StoppingChecksReport stopping_inequality_checks(const DyadicGrid& grid, int n, double p, double q, int trials,
                                                Rng& rng) {
    StoppingChecksReport rep;
    rep.trials = trials;
    for (int t = 0; t < trials; ++t) {
        GridFunction f(grid, n, 1, 2.0);
        GridFunction g(grid, n, 1, 2.0);
        for (int c = 0; c < grid.cells(); ++c)
            for (int i = 0; i < n; ++i) {
                f.at(c, i) = rng.normal();
                g.at(c, i) = rng.normal();
            }
        // random containing cube
        const int lev = rng.uniform_int(0, std::max(0, grid.depth() - 2));
        Cube q0{lev, rng.uniform_int(0, (1 << lev) - 1), 0};
        if (grid.dim() == 2) q0.iy = rng.uniform_int(0, (1 << lev) - 1);

        const auto anti = random_antichain(grid, q0, rng);
        const DisjointSumCheck dsc = disjoint_sum_check(f, g, q0, anti, p, q);
        if (!dsc.ok) ++rep.violations_disjoint_sum;
        if (dsc.rhs > 0) rep.worst_disjoint_margin = std::max(rep.worst_disjoint_margin, dsc.lhs / dsc.rhs);

        PairBodyCache cache(f, g, p, q);
        const double A = 1.5 + 3.0 * rng.uniform();
        const StoppingMassCheck smc = stopping_mass_check(cache, q0, A, n);
        if (!smc.ok) ++rep.violations_stopping_mass;
        if (smc.bound > 0) rep.worst_mass_margin = std::max(rep.worst_mass_margin, smc.selected_measure / smc.bound);
    }
    return rep;
}

} // namespace cbd
