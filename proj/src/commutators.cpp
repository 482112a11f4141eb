#include "cbd/commutators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbd {

double SymbolPair::pair_kernel(int xcell, int ycell) const {
    double acc = 0.0;
    for (int i = 0; i < n(); ++i) acc += a[static_cast<std::size_t>(i)][xcell] * b[static_cast<std::size_t>(i)][ycell];
    return acc;
}

SymbolPair build_classical(const Eigen::VectorXd& b) {
    SymbolPair pair;
    pair.kind = SymbolPair::Kind::classical;
    pair.a = {b, Eigen::VectorXd::Constant(b.size(), -1.0)};
    pair.b = {Eigen::VectorXd::Constant(b.size(), 1.0), b};
    pair.base = {b};
    return pair;
}

SymbolPair build_iterated(const Eigen::VectorXd& b, int k) {
    if (k < 1) throw std::invalid_argument("build_iterated: order must be >= 1");
    if (k > 20) throw std::invalid_argument("build_iterated: binomials past k = 20 overflow doubles");
    SymbolPair pair;
    pair.kind = SymbolPair::Kind::iterated;
    pair.order = k;
    pair.base = {b};
    double binom = 1.0;
    for (int i = 0; i <= k; ++i) {
        Eigen::VectorXd ai(b.size()), bi(b.size());
        for (int c = 0; c < b.size(); ++c) {
            ai[c] = binom * std::pow(b[c], k - i);
            bi[c] = std::pow(-b[c], i);
        }
        pair.a.push_back(ai);
        pair.b.push_back(bi);
        binom = binom * (k - i) / (i + 1);
    }
    return pair;
}

SymbolPair build_mixed(const Eigen::VectorXd& b1, const Eigen::VectorXd& b2) {
    if (b1.size() != b2.size()) throw std::invalid_argument("build_mixed: size mismatch");
    SymbolPair pair;
    pair.kind = SymbolPair::Kind::mixed;
    pair.base = {b1, b2};
    const Eigen::VectorXd one = Eigen::VectorXd::Constant(b1.size(), 1.0);
    pair.a = {b1.cwiseProduct(b2), -b1, -b2, one};
    pair.b = {one, b2, b1, b1.cwiseProduct(b2)};
    return pair;
}

SymbolPair build_custom(std::vector<Eigen::VectorXd> a, std::vector<Eigen::VectorXd> b) {
    if (a.size() != b.size() || a.empty()) throw std::invalid_argument("build_custom: mismatched tuples");
    SymbolPair pair;
    pair.kind = SymbolPair::Kind::custom;
    pair.a = std::move(a);
    pair.b = std::move(b);
    return pair;
}

Eigen::VectorXd apply_generalized(const KernelOperator& T, const SymbolPair& pair, const Eigen::VectorXd& f) {
    const double cell = T.grid().cell_measure();
    Eigen::VectorXd out = Eigen::VectorXd::Zero(f.size());
    for (int i = 0; i < pair.n(); ++i) {
        const Eigen::VectorXd t = cell * (T.kernel() * pair.b[static_cast<std::size_t>(i)].cwiseProduct(f));
        out += pair.a[static_cast<std::size_t>(i)].cwiseProduct(t);
    }
    return out;
}

double mixed_min_norm(const std::function<double(int, int)>& F, const std::vector<int>& cellsX,
                      const std::vector<int>& cellsY, double s, double t) {
    if (!(s >= 1.0) || !(t >= 1.0)) throw std::invalid_argument("mixed_min_norm: exponents must be >= 1");
    const double nx = static_cast<double>(cellsX.size());
    const double ny = static_cast<double>(cellsY.size());
    // inner s in x, outer t in y
    double acc1 = 0.0;
    for (int y : cellsY) {
        double inner = 0.0;
        for (int x : cellsX) inner += std::pow(std::abs(F(x, y)), s);
        acc1 += std::pow(inner / nx, t / s);
    }
    const double i1 = std::pow(acc1 / ny, 1.0 / t);
    // inner t in y, outer s in x
    double acc2 = 0.0;
    for (int x : cellsX) {
        double inner = 0.0;
        for (int y : cellsY) inner += std::pow(std::abs(F(x, y)), t);
        acc2 += std::pow(inner / ny, s / t);
    }
    const double i2 = std::pow(acc2 / nx, 1.0 / s);
    return std::min(i1, i2);
}

double mixed_min_norm(const std::function<double(int, int)>& F, const DyadicGrid& grid, const Cube& q, double s,
                      double t) {
    const auto cells = grid.cells_of(q);
    return mixed_min_norm(F, cells, cells, s, t);
}

double bmo_norm(const DyadicGrid& grid, const Eigen::VectorXd& b, double s) {
    double best = 0.0;
    for (const Cube& q : grid.all_cubes()) {
        const auto cells = grid.cells_of(q);
        double mean = 0.0;
        for (int c : cells) mean += b[c];
        mean /= static_cast<double>(cells.size());
        double acc = 0.0;
        for (int c : cells) acc += std::pow(std::abs(b[c] - mean), s);
        best = std::max(best, std::pow(acc / static_cast<double>(cells.size()), 1.0 / s));
    }
    return best;
}

AstReport a_st_constants(const DyadicGrid& grid, const SymbolPair& pair, double s, double t) {
    if (!(s > 1.0) || !(t > 1.0)) throw std::invalid_argument("a_st_constants: s, t must be in (1, inf)");
    AstReport rep;
    rep.argmax = grid.root();
    auto F = [&pair](int x, int y) { return pair.pair_kernel(x, y); };
    for (const Cube& q : grid.all_cubes()) {
        const double v = mixed_min_norm(F, grid, q, s, t);
        if (v > rep.A_st) {
            rep.A_st = v;
            rep.argmax = q;
        }
        const auto tc = grid.triple_cells(q);
        rep.A_st_triple = std::max(rep.A_st_triple, mixed_min_norm(F, tc, tc, s, t));
    }
    rep.A_st_triple = std::max(rep.A_st_triple, rep.A_st);
    for (const auto& base : pair.base) rep.bmo.push_back(bmo_norm(grid, base, s));
    if (pair.kind == SymbolPair::Kind::mixed) {
        const Eigen::VectorXd& b1 = pair.base[0];
        const Eigen::VectorXd& b2 = pair.base[1];
        for (const Cube& q : grid.all_cubes()) {
            const auto cells = grid.cells_of(q);
            const double nc = static_cast<double>(cells.size());
            double m1 = 0.0, m2 = 0.0;
            for (int c : cells) {
                m1 += b1[c];
                m2 += b2[c];
            }
            m1 /= nc;
            m2 /= nc;
            double o1 = 0.0, o2 = 0.0, both = 0.0;
            for (int c : cells) {
                const double d1 = std::abs(b1[c] - m1);
                const double d2 = std::abs(b2[c] - m2);
                o1 += std::pow(d1, s);
                o2 += std::pow(d2, s);
                both += std::pow(d1 * d2, s);
            }
            rep.S_s = std::max(rep.S_s, std::pow(o1 / nc, 1.0 / s) * std::pow(o2 / nc, 1.0 / s));
            rep.T_s = std::max(rep.T_s, std::pow(both / nc, 1.0 / s));
        }
    }
    return rep;
}

PowerCheckReport bmo_power_check(const DyadicGrid& grid, const Eigen::VectorXd& b, double alpha, double beta,
                                 double p) {
    if (alpha < 0.0 || beta < 0.0 || alpha + beta > 1.0)
        throw std::invalid_argument("bmo_power_check: needs alpha, beta >= 0 with alpha + beta <= 1");
    if (b.minCoeff() < 0.0) throw std::invalid_argument("bmo_power_check: b must be nonnegative");
    PowerCheckReport rep;
    const int N = static_cast<int>(b.size());
    auto B = [&](int x, int y) {
        return std::pow(b[x], alpha) * std::pow(b[y], beta) - std::pow(b[x], beta) * std::pow(b[y], alpha);
    };
    double worst = 0.0;
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) {
            const double lhs = std::abs(B(x, y));
            const double rhs = std::pow(std::abs(b[x] - b[y]), alpha + beta);
            if (rhs > 0)
                worst = std::max(worst, lhs / rhs);
            else
                worst = std::max(worst, lhs > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0);
        }
    rep.worst_cellwise = worst;
    rep.cellwise_ok = worst <= 1.0 + 1e-9;

    rep.bmo_p = bmo_norm(grid, b, p);
    const double bound = std::pow(2.0 * rep.bmo_p, alpha + beta);
    double worst_int = 0.0;
    for (const Cube& q : grid.all_cubes()) {
        const auto cells = grid.cells_of(q);
        const double nc = static_cast<double>(cells.size());
        double acc = 0.0;
        for (int x : cells)
            for (int y : cells) acc += std::pow(std::abs(B(x, y)), p);
        const double lhs = std::pow(acc / (nc * nc), 1.0 / p);
        if (bound > 0)
            worst_int = std::max(worst_int, lhs / bound);
        else
            worst_int = std::max(worst_int, lhs > 1e-12 ? std::numeric_limits<double>::infinity() : 0.0);
    }
    rep.worst_integrated = worst_int;
    rep.integrated_ok = worst_int <= 1.0 + 1e-9;
    return rep;
}

int elementary_inequality_violations(int count, Rng& rng, double* worst_margin) {
    int violations = 0;
    double worst = 0.0;
    for (int i = 0; i < count; ++i) {
        const double u = 10.0 * rng.uniform();
        const double v = 10.0 * rng.uniform();
        const double d = rng.uniform();
        const double lhs = std::abs(std::pow(u, d) - std::pow(v, d)) * std::pow(std::max(u, v), 1.0 - d);
        const double rhs = std::abs(u - v);
        if (lhs > rhs + 1e-12 * std::max(1.0, rhs)) ++violations;
        if (rhs > 0) worst = std::max(worst, lhs / rhs);
    }
    if (worst_margin) *worst_margin = worst;
    return violations;
}

CommutatorReport lp_commutator_report(const KernelOperator& T, const SymbolPair& pair, double s, double t,
                                      double p, double eps) {
    const double tprime = dual_exponent(t);
    if (!(p > tprime && p < s))
        throw std::invalid_argument("lp_commutator_report: p must lie in (t', s)");
    const DyadicGrid& grid = T.grid();
    const int N = grid.cells();
    const double cell = grid.cell_measure();
    CommutatorReport rep;
    rep.s = s;
    rep.t = t;
    rep.p = p;
    rep.constants = a_st_constants(grid, pair, s, t);

    // dense matrix of f -> sum_i a_i T(b_i f); one |cell| factor inside
    Eigen::MatrixXd G(N, N);
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) G(x, y) = cell * T.kernel()(x, y) * pair.pair_kernel(x, y);

    auto lp_norm = [&](const Eigen::VectorXd& v, double e) {
        double acc = 0.0;
        for (int i = 0; i < N; ++i) acc += cell * std::pow(std::abs(v[i]), e);
        return std::pow(acc, 1.0 / e);
    };
    auto lp_norming = [&](const Eigen::VectorXd& v, double e) {
        // maximizer of <f, v>_c over ||f||_e <= 1
        const double ed = dual_exponent(e);
        const double nv = lp_norm(v, ed);
        Eigen::VectorXd out = Eigen::VectorXd::Zero(N);
        if (nv == 0.0) return out;
        for (int i = 0; i < N; ++i) {
            const double mag = std::pow(std::abs(v[i]) / nv, ed - 1.0);
            out[i] = v[i] < 0 ? -mag : mag;
        }
        return out;
    };

    Eigen::VectorXd fbest, gbest;
    double best = 0.0;
    const double pprime = dual_exponent(p);
    for (int start = 0; start < 3; ++start) {
        Eigen::VectorXd f(N);
        Rng rng(0xABCD0001 + static_cast<std::uint64_t>(start));
        for (int i = 0; i < N; ++i) f[i] = start == 0 ? 1.0 : rng.normal();
        const double nf = lp_norm(f, p);
        if (nf == 0.0) continue;
        f /= nf;
        double value = 0.0;
        for (int sweep = 0; sweep < 120; ++sweep) {
            const Eigen::VectorXd u = G * f;
            const double nu = lp_norm(u, p);
            if (nu > best) {
                best = nu;
                fbest = f;
                Eigen::VectorXd g(N);
                for (int i = 0; i < N; ++i) {
                    const double mag = std::pow(std::abs(u[i]) / nu, p - 1.0);
                    g[i] = u[i] < 0 ? -mag : mag;
                }
                gbest = g;
            }
            if (nu <= value * (1.0 + 1e-12)) break;
            value = nu;
            Eigen::VectorXd g(N);
            for (int i = 0; i < N; ++i) {
                const double mag = std::pow(std::abs(u[i]) / nu, p - 1.0);
                g[i] = u[i] < 0 ? -mag : mag;
            }
            const Eigen::VectorXd v = G.transpose() * g;
            f = lp_norming(v, p);
            const double nf2 = lp_norm(f, p);
            if (nf2 == 0.0) break;
            f /= nf2;
        }
    }
    rep.lp_lower = best;
    if (p == 2.0) {
        // exact via singular vectors; the measure factor cancels on both sides
        Eigen::BDCSVD<Eigen::MatrixXd> svd(G, Eigen::ComputeThinU | Eigen::ComputeThinV);
        rep.lp_lower = svd.singularValues()[0];
        fbest = svd.matrixV().col(0);
        gbest = svd.matrixU().col(0);
        rep.lower_exact = true;
    }

    if (fbest.size() == 0) {
        rep.lp_upper = 0.0;
        rep.lower_le_upper = rep.lp_lower <= 1e-12;
        return rep;
    }

    // sparse-route bound for the maximizing pair (f*, g*)
    const int n = pair.n();
    const double eps_run = std::min(eps, 0.4 / static_cast<double>(n));
    GridFunction bf(grid, n, 1, 2.0), ag(grid, n, 1, 2.0);
    for (int c = 0; c < N; ++c)
        for (int i = 0; i < n; ++i) {
            bf.at(c, i) = pair.b[static_cast<std::size_t>(i)][c] * fbest[c];
            ag.at(c, i) = pair.a[static_cast<std::size_t>(i)][c] * gbest[c];
        }
    const DominationReport pipe = cbd_pipeline(T, bf, ag, eps_run);
    rep.pipeline_C = pipe.C_n;
    rep.pipeline_eta = 1.0 - n * eps_run;
    const double levels = static_cast<double>(grid.depth() + 1);
    const double maximal_bound = std::pow(levels, 1.0 / tprime) * std::pow(levels, 1.0 / dual_exponent(s));
    rep.lp_upper = pipe.C_n * 3.0 * rep.constants.A_st_triple / rep.pipeline_eta * maximal_bound;
    // the measured Rayleigh quotient of the maximizer must sit under the chain
    const double pairing = cell * gbest.dot(G * fbest);
    const double denom = lp_norm(fbest, p) * lp_norm(gbest, pprime);
    const double rayleigh = denom > 0 ? std::abs(pairing) / denom : 0.0;
    rep.lower_le_upper = rayleigh <= rep.lp_upper * (1.0 + 1e-9);
    return rep;
}

} // namespace cbd
