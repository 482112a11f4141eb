#include "cbd/domination.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace cbd {

namespace {
constexpr double kPi = 3.14159265358979323846264338;
} // namespace

KernelOperator::KernelOperator(const DyadicGrid& grid, Kind kind, Eigen::MatrixXd k, double c, double delta)
    : grid_(&grid), kind_(kind), k_(std::move(k)), c_(c), delta_(delta) {}

KernelOperator KernelOperator::hilbert_periodic(const DyadicGrid& grid) {
    if (grid.dim() != 1) throw std::invalid_argument("KernelOperator: kernels require d = 1");
    if (grid.depth() > 12) throw std::invalid_argument("KernelOperator: dense kernels cap the grid at L <= 12");
    const int N = grid.cells();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(N, N);
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) {
            if (x == y) continue;
            k(x, y) = 1.0 / std::tan(kPi * (grid.cell_midpoint(x) - grid.cell_midpoint(y)));
        }
    return KernelOperator(grid, Kind::hilbert_periodic, std::move(k), 1.0, 1.0);
}

KernelOperator KernelOperator::dini_smooth(const DyadicGrid& grid, double c, double delta_mod) {
    if (grid.dim() != 1) throw std::invalid_argument("KernelOperator: kernels require d = 1");
    if (grid.depth() > 12) throw std::invalid_argument("KernelOperator: dense kernels cap the grid at L <= 12");
    if (!(delta_mod > 0.0 && delta_mod <= 1.0)) throw std::invalid_argument("dini_smooth: delta_mod in (0,1]");
    const int N = grid.cells();
    Eigen::MatrixXd k = Eigen::MatrixXd::Zero(N, N);
    for (int x = 0; x < N; ++x)
        for (int y = 0; y < N; ++y) {
            if (x == y) continue;
            const double dist = grid.cell_distance(x, y);
            k(x, y) = c * std::pow(dist, delta_mod - 1.0);
        }
    return KernelOperator(grid, Kind::dini_smooth, std::move(k), c, delta_mod);
}

KernelOperator KernelOperator::make(const DyadicGrid& grid, const std::string& kind, double c, double delta_mod) {
    if (kind == "hilbert_periodic") return hilbert_periodic(grid);
    if (kind == "dini_smooth") return dini_smooth(grid, c, delta_mod);
    throw std::invalid_argument("KernelOperator: unknown kind '" + kind + "'");
}

GridFunction KernelOperator::apply(const GridFunction& f) const {
    GridFunction out(*grid_, f.n(), f.m(), f.r());
    out.data() = grid_->cell_measure() * (k_ * f.data());
    return out;
}

double KernelOperator::l2_norm() const {
    // uniform cell measure: the L^2 norm is |cell| times the spectral norm
    return grid_->cell_measure() * k_.jacobiSvd().singularValues()[0];
}

double bilinear_form(const KernelOperator& T, const GridFunction& f, const GridFunction& g) {
    if (f.n() != g.n() || f.m() != g.m()) throw std::invalid_argument("bilinear_form: shape mismatch");
    const double c = T.grid().cell_measure();
    const Eigen::MatrixXd tf = T.kernel() * f.data();
    return c * c * (tf.array() * g.data().array()).sum();
}

double bilinear_form_masked(const KernelOperator& T, const GridFunction& f, const GridFunction& g,
                            const std::vector<int>& src_cells, const std::vector<int>& tgt_cells) {
    if (f.n() != g.n() || f.m() != g.m()) throw std::invalid_argument("bilinear_form_masked: shape mismatch");
    const double c = T.grid().cell_measure();
    const int nm = f.n() * f.m();
    double acc = 0.0;
    for (int x : tgt_cells) {
        for (int k = 0; k < nm; ++k) {
            if (g.data()(x, k) == 0.0) continue;
            double tf = 0.0;
            for (int y : src_cells) tf += T.kernel()(x, y) * f.data()(y, k);
            acc += tf * g.data()(x, k);
        }
    }
    return acc * c * c;
}

namespace {

// Everything the scalar exceptional-set step needs for one component on one
// cube: per-subcube averages of ||f||_E, per-subcube grand truncation values,
// and the two quantile thresholds.
struct ScalarScaleData {
    std::vector<double> avg;    // by cube id (subcubes of Q only)
    std::vector<double> trunc;  // by cube id
    double lambda1 = 0.0;
    double lambda2 = 0.0;
};

double quantile_threshold(std::vector<double> v, double level) {
    std::sort(v.begin(), v.end());
    const std::size_t nv = v.size();
    std::size_t k = static_cast<std::size_t>(std::ceil(level * static_cast<double>(nv)));
    if (k == 0) k = 1;
    if (k > nv) k = nv;
    return v[k - 1];
}

ScalarScaleData scalar_scale_data(const KernelOperator& T, const Cube& q, const GridFunction& f, double eps) {
    const DyadicGrid& grid = T.grid();
    ScalarScaleData data;
    data.avg.assign(static_cast<std::size_t>(grid.cube_count()), 0.0);
    data.trunc.assign(static_cast<std::size_t>(grid.cube_count()), 0.0);

    const std::vector<int> cells3q = grid.triple_cells(q);
    std::vector<char> in3q(static_cast<std::size_t>(grid.cells()), 0);
    for (int c : cells3q) in3q[static_cast<std::size_t>(c)] = 1;

    const Eigen::VectorXd norms = f.component_norms(0);
    const double cell = grid.cell_measure();
    const int m = f.m();

    // T(1_{3Q} f) on every cell, per inner component.
    Eigen::MatrixXd masked = Eigen::MatrixXd::Zero(grid.cells(), m);
    for (int c : cells3q) masked.row(c) = f.data().row(c);
    const Eigen::MatrixXd tf3q = cell * (T.kernel() * masked);

    for (const Cube& sub : grid.descendants(q)) {
        const std::size_t id = static_cast<std::size_t>(grid.cube_id(sub));
        const auto sub_cells = grid.cells_of(sub);
        double acc = 0.0;
        for (int c : sub_cells) acc += norms[c];
        data.avg[id] = acc / static_cast<double>(sub_cells.size());

        // u(Q') = max_{xi in Q'} ||T(1_{3Q minus 3Q'} f)(xi)||_E
        std::vector<int> sub3;
        for (int c : grid.triple_cells(sub))
            if (in3q[static_cast<std::size_t>(c)]) sub3.push_back(c);
        double umax = 0.0;
        Eigen::VectorXd diff(m);
        for (int xi : sub_cells) {
            for (int j = 0; j < m; ++j) {
                double local = 0.0;
                for (int y : sub3) local += T.kernel()(xi, y) * f.data()(y, j);
                diff[j] = tf3q(xi, j) - cell * local;
            }
            umax = std::max(umax, lr_norm(diff, f.r()));
        }
        data.trunc[id] = umax;
    }

    // Cellwise chain maxima and the (1 - eps/2) quantiles.
    const auto q_cells = grid.cells_of(q);
    std::vector<double> score1, score2;
    score1.reserve(q_cells.size());
    score2.reserve(q_cells.size());
    for (int c : q_cells) {
        double m1 = 0.0, m2 = 0.0;
        for (int l = q.level; l <= grid.depth(); ++l) {
            const std::size_t id = static_cast<std::size_t>(grid.cube_id(grid.ancestor(c, l)));
            m1 = std::max(m1, data.avg[id]);
            m2 = std::max(m2, data.trunc[id]);
        }
        score1.push_back(m1);
        score2.push_back(m2);
    }
    data.lambda1 = quantile_threshold(score1, 1.0 - eps / 2.0);
    data.lambda2 = quantile_threshold(score2, 1.0 - eps / 2.0);
    return data;
}

double tq_value(const KernelOperator& T, const GridFunction& f, const GridFunction& g, const Cube& q,
                TQCache* cache) {
    const DyadicGrid& grid = T.grid();
    if (cache) {
        auto it = cache->find(grid.cube_id(q));
        if (it != cache->end()) return it->second;
    }
    const double v = bilinear_form_masked(T, f, g, grid.triple_cells(q), grid.cells_of(q));
    if (cache) (*cache)[grid.cube_id(q)] = v;
    return v;
}

// Antichain of the union of per-coordinate exceptional cubes.
std::vector<Cube> union_antichain(const DyadicGrid& grid, const Cube& q,
                                  const std::vector<ScalarScaleData>& comps) {
    return grid.maximal_cubes(q, [&](const Cube& c) {
        if (c == q) return false;
        const std::size_t id = static_cast<std::size_t>(grid.cube_id(c));
        for (const auto& d : comps)
            if (d.avg[id] > d.lambda1 || d.trunc[id] > d.lambda2) return true;
        return false;
    });
}

} // namespace

Eigen::VectorXd grand_truncation(const KernelOperator& T, const Cube& q, const GridFunction& f) {
    if (f.n() != 1) throw std::invalid_argument("grand_truncation: single outer component required");
    const DyadicGrid& grid = T.grid();
    const ScalarScaleData data = scalar_scale_data(T, q, f, 1.0); // thresholds unused
    const auto q_cells = grid.cells_of(q);
    Eigen::VectorXd out(static_cast<int>(q_cells.size()));
    for (std::size_t idx = 0; idx < q_cells.size(); ++idx) {
        double m2 = 0.0;
        for (int l = q.level; l <= grid.depth(); ++l)
            m2 = std::max(m2, data.trunc[static_cast<std::size_t>(grid.cube_id(grid.ancestor(q_cells[idx], l)))]);
        out[static_cast<int>(idx)] = m2;
    }
    return out;
}

SingleScaleResult single_scale(const KernelOperator& T, const Cube& q, const GridFunction& f,
                               const GridFunction& g, double eps, double eps_mvee, TQCache* tq_cache) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("single_scale: eps must be in (0,1)");
    const int n = f.n();
    if (n > 1 && !(n * eps < 1.0)) throw std::invalid_argument("single_scale: vector input needs n*eps < 1");
    const DyadicGrid& grid = T.grid();
    SingleScaleResult res;
    res.rank = n;

    const std::vector<int> cells3q = grid.triple_cells(q);
    const std::vector<int> cellsq = grid.cells_of(q);

    const ConvexBody K = body_avLp_cells(f, cells3q, 1.0);
    const ConvexBody G = body_avLp_cells(g, cellsq, 1.0);
    const DotResult dval = dot(K, G);
    res.dot_value = dval.value;
    res.dot_exact = dval.exact;

    if (K.is_zero()) return res; // t vanishes on and below Q

    GridFunction frot = f;
    GridFunction grot = g;
    if (n > 1) {
        const MveeResult mv = mvee(K, eps_mvee);
        if (mv.ellipsoid.rank < n) {
            // degenerate body: project onto its span and rerun there
            const Eigen::MatrixXd span = mv.ellipsoid.span_basis();
            SingleScaleResult inner =
                single_scale(T, q, f.outer_transform(span.transpose()), g.outer_transform(span.transpose()), eps,
                             eps_mvee, nullptr);
            inner.degenerate = true;
            inner.rank = mv.ellipsoid.rank;
            // the pair form is invariant under the isometric span reduction
            inner.dot_value = res.dot_value;
            inner.dot_exact = res.dot_exact;
            if (res.dot_value > 0) inner.c_meas = inner.residual / (res.dot_value * grid.measure(q));
            return inner;
        }
        res.sandwich_ratio = mv.outer_ratio / std::sqrt(static_cast<double>(n));
        const RoundingMap rk = round_transform(mv.ellipsoid);
        frot = f.outer_transform(rk.forward);
        grot = g.outer_transform(rk.inverse_t);
    }

    std::vector<ScalarScaleData> comps;
    comps.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) comps.push_back(scalar_scale_data(T, q, frot.component(i), eps));

    res.exceptional = union_antichain(grid, q, comps);
    double mass = 0.0;
    for (const Cube& c : res.exceptional) mass += grid.measure(c);
    res.exceptional_mass = mass / grid.measure(q);

    // residual of the full vector pair against the common antichain
    double tsum = 0.0;
    for (const Cube& c : res.exceptional) tsum += tq_value(T, f, g, c, tq_cache);
    res.residual = std::abs(tq_value(T, f, g, q, tq_cache) - tsum);
    if (res.dot_value > 0) res.c_meas = res.residual / (res.dot_value * grid.measure(q));

    // per-coordinate scalar constants against the same antichain
    for (int i = 0; i < n; ++i) {
        const GridFunction fc = frot.component(i);
        const GridFunction gc = grot.component(i);
        double ts = 0.0;
        for (const Cube& c : res.exceptional)
            ts += bilinear_form_masked(T, fc, gc, grid.triple_cells(c), grid.cells_of(c));
        const double resid = std::abs(bilinear_form_masked(T, fc, gc, cells3q, cellsq) - ts);
        const double den =
            local_norm_cells(fc, 0, cells3q, 1.0) * local_norm_cells(gc, 0, cellsq, 1.0) * grid.measure(q);
        if (den > 0) res.scalar_c_max = std::max(res.scalar_c_max, resid / den);
    }
    return res;
}

DominationReport cbd_pipeline(const KernelOperator& T, const GridFunction& f, const GridFunction& g, double eps,
                              double eps_mvee) {
    const int n = f.n();
    if (!(n * eps < 0.5)) throw std::invalid_argument("cbd_pipeline: requires n*eps < 1/2");
    const DyadicGrid& grid = T.grid();
    DominationReport rep;
    rep.eps = eps;
    rep.eps_n = n * eps;
    rep.family.grid = &grid;
    rep.family.eta = 1.0 - n * eps;
    rep.family.provenance = "cbd_pipeline";

    TQCache tq;
    double residual_signed_sum = 0.0;
    double leaf_ratio = 0.0;
    const double tnorm = T.l2_norm();
    const double supf = f.sup_norm();
    const double supg = g.sup_norm();

    std::vector<Cube> generation{grid.root()};
    while (!generation.empty()) {
        std::vector<Cube> next;
        for (const Cube& q : generation) {
            SingleScaleResult res = single_scale(T, q, f, g, eps, eps_mvee, &tq);
            if (res.degenerate) ++rep.degenerate_cubes;
            if (!res.dot_exact) rep.all_dots_exact = false;
            rep.max_sandwich_ratio = std::max(rep.max_sandwich_ratio, res.sandwich_ratio);
            rep.scalar_c_max = std::max(rep.scalar_c_max, res.scalar_c_max);

            SparseFamily::Member member;
            member.cube = q;
            member.a_value = res.dot_value;
            std::vector<char> removed(static_cast<std::size_t>(grid.cells()), 0);
            for (const Cube& s : res.exceptional)
                for (int c : grid.cells_of(s)) removed[static_cast<std::size_t>(c)] = 1;
            for (int c : grid.cells_of(q))
                if (!removed[static_cast<std::size_t>(c)]) member.witness.push_back(c);
            rep.family.members.push_back(std::move(member));

            double child_sum = 0.0;
            for (const Cube& s : res.exceptional) child_sum += tq_value(T, f, g, s, &tq);
            const double tqv = tq_value(T, f, g, q, &tq);
            residual_signed_sum += tqv - child_sum;

            DominationReport::CubeRow row;
            row.cube = q;
            row.dot_value = res.dot_value;
            row.residual_signed = tqv - child_sum;
            row.exceptional_count = static_cast<int>(res.exceptional.size());
            // measured against the same dot values that enter the sparse form,
            // so C_n * sparse_form dominates |t| by telescoping alone
            const double den = res.dot_value * grid.measure(q);
            row.c_hat = den > 0 ? std::abs(row.residual_signed) / den
                                : (std::abs(row.residual_signed) == 0.0 ? 0.0
                                                                        : std::numeric_limits<double>::infinity());
            rep.C_n = std::max(rep.C_n, row.c_hat);
            rep.rows.push_back(row);

            if (res.exceptional.empty()) {
                // terminal cube: |t_Q| against the L^2 x L^2 boundedness bound
                const double bound = static_cast<double>(n * f.m()) * tnorm * std::sqrt(3.0) * supf * supg *
                                     grid.measure(q);
                if (bound > 0) leaf_ratio = std::max(leaf_ratio, std::abs(tqv) / bound);
            }
            for (const Cube& s : res.exceptional) next.push_back(s);
        }
        generation = std::move(next);
    }

    rep.lhs = std::abs(bilinear_form(T, f, g));
    double sf = 0.0;
    for (const auto& m : rep.family.members) sf += grid.measure(m.cube) * m.a_value;
    rep.sparse_form_value = sf;
    rep.telescoping_error = std::abs(residual_signed_sum - tq_value(T, f, g, grid.root(), &tq));
    rep.leaf_bound_ratio = leaf_ratio;
    const double rhs = rep.C_n * sf;
    rep.verdict_ratio = rhs > 0 ? rep.lhs / rhs : (rep.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    const SparseCheck check = verify_sparse(rep.family);
    rep.ok = check.ok && rep.verdict_ratio <= 1.0 + 1e-9 &&
             rep.telescoping_error <= 1e-10 * std::max(1.0, rep.lhs) && rep.leaf_bound_ratio <= 1.0 + 1e-9;
    return rep;
}

LtildeResult ltilde_opnorm(const SparseFamily& S, const MatrixWeight& W, const MatrixWeight& V, int ainfty_dirs) {
    LtildeResult out;
    if (!S.grid) throw std::invalid_argument("ltilde_opnorm: family has no grid");
    const DyadicGrid& grid = *S.grid;
    const int N = grid.cells();
    const int n = W.n();

    std::vector<Eigen::MatrixXd> wsqrt, vsqrt;
    wsqrt.reserve(static_cast<std::size_t>(N));
    vsqrt.reserve(static_cast<std::size_t>(N));
    for (int c = 0; c < N; ++c) {
        wsqrt.push_back(spd_power(W.at(c), 0.5));
        vsqrt.push_back(spd_power(V.at(c), 0.5));
    }

    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    for (const auto& member : S.members) {
        const auto qcells = grid.cells_of(member.cube);
        const auto tcells = grid.triple_cells(member.cube);
        const double inv3q = 1.0 / (grid.cell_measure() * static_cast<double>(tcells.size()));
        for (int x : qcells)
            for (int y : tcells) {
                const double nrm =
                    n == 1 ? vsqrt[static_cast<std::size_t>(x)](0, 0) * wsqrt[static_cast<std::size_t>(y)](0, 0)
                           : (vsqrt[static_cast<std::size_t>(x)] * wsqrt[static_cast<std::size_t>(y)])
                                 .jacobiSvd()
                                 .singularValues()[0];
                M(x, y) += inv3q * nrm * grid.cell_measure();
            }
    }
    // value-to-value matrix; the uniform cell measure cancels in the L^2 norm
    out.norm = M.jacobiSvd().singularValues()[0];
    out.a2 = a2_characteristic(W, V).value;
    out.ainf_w = ainfty_matrix(W, std::max(ainfty_dirs, 2 * n));
    out.ainf_v = ainfty_matrix(V, std::max(ainfty_dirs, 2 * n));
    const double den = std::sqrt(out.a2 * out.ainf_w * out.ainf_v);
    out.ratio = den > 0 ? out.norm / den : 0.0;
    return out;
}

WeightedNormResult weighted_opnorm_bounds(const KernelOperator& T, const MatrixWeight& W, int m, double r) {
    WeightedNormResult out;
    const DyadicGrid& grid = T.grid();
    const int N = grid.cells();
    const int n = W.n();
    out.a2 = a2_characteristic(W).value;

    std::vector<Eigen::MatrixXd> whalf, winvhalf;
    whalf.reserve(static_cast<std::size_t>(N));
    winvhalf.reserve(static_cast<std::size_t>(N));
    for (int c = 0; c < N; ++c) {
        whalf.push_back(spd_power(W.at(c), 0.5));
        winvhalf.push_back(spd_power(W.at(c), -0.5));
    }

    if (r == 2.0 || m == 1) {
        // Hilbert case: the E-blocks are identical, so the norm equals the
        // norm of one (N n) x (N n) block of W^{1/2} T W^{-1/2}.
        Eigen::MatrixXd B(N * n, N * n);
        for (int x = 0; x < N; ++x)
            for (int y = 0; y < N; ++y) {
                const Eigen::MatrixXd block =
                    grid.cell_measure() * T.kernel()(x, y) *
                    (whalf[static_cast<std::size_t>(x)] * winvhalf[static_cast<std::size_t>(y)]);
                B.block(x * n, y * n, n, n) = block;
            }
        Eigen::BDCSVD<Eigen::MatrixXd> svd(B);
        out.lower = svd.singularValues()[0];
        out.exact = true;
    } else {
        // dual-pair ascent over normalized test functions
        auto conj_apply = [&](const GridFunction& x, bool transpose) {
            GridFunction half(grid, n, m, r);
            for (int c = 0; c < N; ++c) {
                Eigen::MatrixXd blk(n, m);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < m; ++j) blk(i, j) = x.at(c, i, j);
                const Eigen::MatrixXd y = (transpose ? whalf : winvhalf)[static_cast<std::size_t>(c)] * blk;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < m; ++j) half.at(c, i, j) = y(i, j);
            }
            GridFunction mid(grid, n, m, r);
            if (transpose)
                mid.data() = grid.cell_measure() * (T.kernel().transpose() * half.data());
            else
                mid.data() = grid.cell_measure() * (T.kernel() * half.data());
            GridFunction outf(grid, n, m, r);
            for (int c = 0; c < N; ++c) {
                Eigen::MatrixXd blk(n, m);
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < m; ++j) blk(i, j) = mid.at(c, i, j);
                const Eigen::MatrixXd y = (transpose ? winvhalf : whalf)[static_cast<std::size_t>(c)] * blk;
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < m; ++j) outf.at(c, i, j) = y(i, j);
            }
            return outf;
        };
        auto space_norm = [&](const GridFunction& x, double rr) {
            double acc = 0.0;
            for (int c = 0; c < N; ++c) {
                double cellsq = 0.0;
                for (int i = 0; i < n; ++i) {
                    Eigen::VectorXd row(m);
                    for (int j = 0; j < m; ++j) row[j] = x.at(c, i, j);
                    const double s = lr_norm(row, rr);
                    cellsq += s * s;
                }
                acc += grid.cell_measure() * cellsq;
            }
            return std::sqrt(acc);
        };
        // norming element of the dual pairing <u, v> = sum c u v
        auto norming = [&](const GridFunction& x, double rr) {
            GridFunction outf(grid, n, m, dual_exponent(rr));
            const double total = space_norm(x, rr);
            if (total == 0.0) return outf;
            for (int c = 0; c < N; ++c)
                for (int i = 0; i < n; ++i) {
                    Eigen::VectorXd row(m);
                    for (int j = 0; j < m; ++j) row[j] = x.at(c, i, j);
                    const double s = lr_norm(row, rr);
                    const Eigen::VectorXd xi = lr_norming(row, rr);
                    for (int j = 0; j < m; ++j) outf.at(c, i, j) = s * xi[j] / total;
                }
            return outf;
        };

        double best = 0.0;
        for (int start = 0; start < 3; ++start) {
            GridFunction x(grid, n, m, r);
            Rng rng(0xFEED5EED + static_cast<std::uint64_t>(start));
            for (int c = 0; c < N; ++c)
                for (int i = 0; i < n; ++i)
                    for (int j = 0; j < m; ++j) x.at(c, i, j) = start == 0 ? 1.0 : rng.normal();
            double nx = space_norm(x, r);
            if (nx == 0.0) continue;
            x.data() /= nx;
            double value = 0.0;
            for (int sweep = 0; sweep < 80; ++sweep) {
                const GridFunction u = conj_apply(x, false);
                const double nu = space_norm(u, r);
                if (nu <= value * (1.0 + 1e-12)) {
                    value = std::max(value, nu);
                    break;
                }
                value = nu;
                const GridFunction gdual = norming(u, r);
                const GridFunction v = conj_apply(gdual, true);
                // maximize <x, v> over the unit ball of L^2(l^2(l^r))
                GridFunction xn = norming(v, dual_exponent(r));
                const double nn = space_norm(xn, r);
                if (nn == 0.0) break;
                xn.data() /= nn;
                x = xn;
            }
            best = std::max(best, value);
        }
        out.lower = best;
        out.exact = false;
    }
    out.ratio = out.a2 > 0 ? out.lower / std::pow(out.a2, 1.5) : 0.0;
    return out;
}

} // namespace cbd
