#include "cbd/weights.hpp"

#include "cbd/john.hpp"

#include <cmath>
#include <stdexcept>

namespace cbd {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
} // namespace

MatrixWeight::MatrixWeight(const DyadicGrid& grid, std::vector<Eigen::MatrixXd> cells)
    : grid_(&grid), w_(std::move(cells)) {
    if (static_cast<int>(w_.size()) != grid.cells()) throw std::invalid_argument("MatrixWeight: cell count mismatch");
    n_ = static_cast<int>(w_.front().rows());
    winv_.reserve(w_.size());
    for (const Eigen::MatrixXd& m : w_) {
        if (m.rows() != n_ || m.cols() != n_) throw std::invalid_argument("MatrixWeight: non-square cell matrix");
        if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, m.cwiseAbs().maxCoeff()))
            throw std::invalid_argument("MatrixWeight: cell matrix not symmetric");
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
        if (es.eigenvalues().minCoeff() <= 0.0) throw std::invalid_argument("invalid weight: cell matrix not SPD");
        winv_.push_back(es.eigenvectors() * es.eigenvalues().cwiseInverse().asDiagonal() *
                        es.eigenvectors().transpose());
    }
}

Eigen::MatrixXd MatrixWeight::average(const std::vector<int>& cells) const {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n_, n_);
    for (int c : cells) acc += w_[static_cast<std::size_t>(c)];
    return acc / static_cast<double>(cells.size());
}

Eigen::MatrixXd MatrixWeight::average(const Cube& q) const { return average(grid_->cells_of(q)); }

MatrixWeight MatrixWeight::inverse() const {
    MatrixWeight out(*grid_, winv_);
    return out;
}

GridFunction MatrixWeight::to_gridfunction() const {
    GridFunction f(*grid_, n_, n_, 2.0);
    for (int c = 0; c < grid_->cells(); ++c)
        for (int i = 0; i < n_; ++i)
            for (int j = 0; j < n_; ++j) f.at(c, i, j) = w_[static_cast<std::size_t>(c)](i, j);
    return f;
}

MatrixWeight MatrixWeight::from_gridfunction(const GridFunction& f) {
    if (f.n() != f.m()) throw std::invalid_argument("from_gridfunction: blocks must be square");
    std::vector<Eigen::MatrixXd> cells;
    cells.reserve(static_cast<std::size_t>(f.grid().cells()));
    for (int c = 0; c < f.grid().cells(); ++c) {
        Eigen::MatrixXd m(f.n(), f.n());
        for (int i = 0; i < f.n(); ++i)
            for (int j = 0; j < f.n(); ++j) m(i, j) = f.at(c, i, j);
        cells.push_back(m);
    }
    return MatrixWeight(f.grid(), std::move(cells));
}

Eigen::MatrixXd spd_power(const Eigen::MatrixXd& a, double exponent) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
    const double floor = 1e-14 * std::max(0.0, es.eigenvalues().maxCoeff());
    Eigen::VectorXd lam = es.eigenvalues().cwiseMax(floor);
    Eigen::VectorXd plam(lam.size());
    for (int i = 0; i < lam.size(); ++i) plam[i] = std::pow(lam[i], exponent);
    return es.eigenvectors() * plam.asDiagonal() * es.eigenvectors().transpose();
}

A2Result a2_characteristic(const MatrixWeight& W, const MatrixWeight& V) {
    if (&W.grid() != &V.grid() || W.n() != V.n()) throw std::invalid_argument("a2: weights on different grids");
    A2Result best;
    best.argmax = W.grid().root();
    for (const Cube& q : W.grid().all_cubes()) {
        const auto cells = W.grid().cells_of(q);
        const Eigen::MatrixXd aw = spd_power(W.average(cells), 0.5);
        const Eigen::MatrixXd av = spd_power(V.average(cells), 0.5);
        const double nrm = (aw * av).jacobiSvd().singularValues()[0];
        if (nrm * nrm > best.value) {
            best.value = nrm * nrm;
            best.argmax = q;
        }
    }
    return best;
}

A2Result a2_characteristic(const MatrixWeight& W) { return a2_characteristic(W, W.inverse()); }

double ainfty_scalar(const DyadicGrid& grid, const Eigen::VectorXd& w) {
    if (w.size() != grid.cells()) throw std::invalid_argument("ainfty_scalar: size mismatch");
    if (w.minCoeff() <= 0.0) throw std::invalid_argument("ainfty_scalar: weight must be positive");
    // Per-cube averages once, then chain maxima per cube.
    std::vector<double> avg(static_cast<std::size_t>(grid.cube_count()), 0.0);
    for (const Cube& q : grid.all_cubes()) {
        double acc = 0.0;
        for (int c : grid.cells_of(q)) acc += w[c];
        avg[static_cast<std::size_t>(grid.cube_id(q))] = acc / grid.cell_count(q);
    }
    double best = 0.0;
    for (const Cube& q : grid.all_cubes()) {
        // M(1_Q w)(x) for x in Q equals the maximal average over the ancestor
        // chain within Q (larger dyadic cubes only dilute the mass).
        double integral = 0.0;
        double mass = 0.0;
        for (int c : grid.cells_of(q)) {
            double m = 0.0;
            for (int l = q.level; l <= grid.depth(); ++l)
                m = std::max(m, avg[static_cast<std::size_t>(grid.cube_id(grid.ancestor(c, l)))]);
            integral += m;
            mass += w[c];
        }
        best = std::max(best, integral / mass);
    }
    return best;
}

double ainfty_matrix(const MatrixWeight& W, int direction_count) {
    if (direction_count < 2 * W.n()) throw std::invalid_argument("ainfty_matrix: need at least 2n directions");
    double best = 0.0;
    Eigen::VectorXd we(W.grid().cells());
    for (const Eigen::VectorXd& e : direction_net(W.n(), direction_count)) {
        for (int c = 0; c < W.grid().cells(); ++c) we[c] = e.dot(W.at(c) * e);
        best = std::max(best, ainfty_scalar(W.grid(), we));
    }
    return best;
}

double weighted_norm(const GridFunction& f, const MatrixWeight& W, double p) {
    if (f.n() != W.n()) throw std::invalid_argument("weighted_norm: dimension mismatch");
    if (!(p >= 1.0) || p == kInfExponent) throw std::invalid_argument("weighted_norm: p must be in [1, inf)");
    const DyadicGrid& grid = f.grid();
    double acc = 0.0;
    Eigen::MatrixXd block(f.n(), f.m());
    for (int c = 0; c < grid.cells(); ++c) {
        const Eigen::MatrixXd wp = spd_power(W.at(c), 1.0 / p);
        for (int i = 0; i < f.n(); ++i)
            for (int j = 0; j < f.m(); ++j) block(i, j) = f.at(c, i, j);
        const Eigen::MatrixXd v = wp * block;
        double cellsq = 0.0;
        for (int i = 0; i < f.n(); ++i) {
            const double s = lr_norm(v.row(i).transpose(), f.r());
            cellsq += s * s;
        }
        acc += grid.cell_measure() * std::pow(std::sqrt(cellsq), p);
    }
    return std::pow(acc, 1.0 / p);
}

MatrixWeight identity_weight(const DyadicGrid& grid, int n) {
    std::vector<Eigen::MatrixXd> cells(static_cast<std::size_t>(grid.cells()), Eigen::MatrixXd::Identity(n, n));
    return MatrixWeight(grid, std::move(cells));
}

Eigen::VectorXd scalar_power_weight(const DyadicGrid& grid, double alpha, double x0) {
    Eigen::VectorXd w(grid.cells());
    for (int c = 0; c < grid.cells(); ++c) {
        double dist = 0.0;
        if (grid.dim() == 1) {
            double d0 = std::abs(grid.cell_midpoint(c, 0) - x0);
            dist = std::min(d0, 1.0 - d0);
        } else {
            for (int axis = 0; axis < 2; ++axis) {
                double d0 = std::abs(grid.cell_midpoint(c, axis) - x0);
                dist = std::max(dist, std::min(d0, 1.0 - d0));
            }
        }
        w[c] = std::pow(dist, alpha);
    }
    return w;
}

bool scalar_power_in_a2_range(double alpha, int dim) { return alpha > -dim && alpha < dim; }

MatrixWeight scalar_to_matrix(const DyadicGrid& grid, const Eigen::VectorXd& w) {
    std::vector<Eigen::MatrixXd> cells;
    cells.reserve(static_cast<std::size_t>(grid.cells()));
    for (int c = 0; c < grid.cells(); ++c) {
        Eigen::MatrixXd m(1, 1);
        m(0, 0) = w[c];
        cells.push_back(m);
    }
    return MatrixWeight(grid, std::move(cells));
}

MatrixWeight diagonal_weight(const DyadicGrid& grid, const std::vector<Eigen::VectorXd>& diag) {
    const int n = static_cast<int>(diag.size());
    std::vector<Eigen::MatrixXd> cells;
    cells.reserve(static_cast<std::size_t>(grid.cells()));
    for (int c = 0; c < grid.cells(); ++c) {
        Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = diag[static_cast<std::size_t>(i)][c];
        cells.push_back(m);
    }
    return MatrixWeight(grid, std::move(cells));
}

MatrixWeight bloom_rotated_weight(const DyadicGrid& grid, const Eigen::VectorXd& theta,
                                  const std::vector<Eigen::VectorXd>& lambdas) {
    if (lambdas.size() != 2) throw std::invalid_argument("bloom_rotated_weight: n = 2 form needs two scalar weights");
    std::vector<Eigen::MatrixXd> cells;
    cells.reserve(static_cast<std::size_t>(grid.cells()));
    for (int c = 0; c < grid.cells(); ++c) {
        Eigen::Matrix2d U;
        U << std::cos(theta[c]), -std::sin(theta[c]), std::sin(theta[c]), std::cos(theta[c]);
        Eigen::Matrix2d lam = Eigen::Matrix2d::Zero();
        lam(0, 0) = lambdas[0][c];
        lam(1, 1) = lambdas[1][c];
        cells.push_back(U.transpose() * lam * U);
    }
    return MatrixWeight(grid, std::move(cells));
}

MatrixWeight random_logsmooth_weight(const DyadicGrid& grid, int n, std::uint64_t seed, int modes, double amplitude) {
    Rng rng(seed);
    // Low-frequency Fourier coefficients per symmetric entry.
    struct ModeCoef {
        double c, s;
    };
    std::vector<std::vector<ModeCoef>> coef(static_cast<std::size_t>(n * n));
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            auto& v = coef[static_cast<std::size_t>(i * n + j)];
            for (int k = 0; k < modes; ++k) v.push_back({rng.normal() * amplitude / (k + 1), rng.normal() * amplitude / (k + 1)});
        }
    std::vector<Eigen::MatrixXd> cells;
    cells.reserve(static_cast<std::size_t>(grid.cells()));
    for (int c = 0; c < grid.cells(); ++c) {
        const double x = grid.cell_midpoint(c, 0);
        const double y = grid.dim() == 2 ? grid.cell_midpoint(c, 1) : 0.0;
        Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j) {
                double val = 0.0;
                const auto& v = coef[static_cast<std::size_t>(i * n + j)];
                for (int k = 0; k < modes; ++k)
                    val += v[static_cast<std::size_t>(k)].c * std::cos(kTwoPi * (k + 1) * (x + 0.37 * y)) +
                           v[static_cast<std::size_t>(k)].s * std::sin(kTwoPi * (k + 1) * (x + 0.61 * y));
                S(i, j) = val;
                S(j, i) = val;
            }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
        Eigen::VectorXd lam = es.eigenvalues();
        for (int i = 0; i < n; ++i) lam[i] = std::exp(lam[i]);
        cells.push_back(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose());
    }
    return MatrixWeight(grid, std::move(cells));
}

MatrixWeight make_weight(const DyadicGrid& grid, const std::string& kind,
                         const std::map<std::string, double>& params, std::uint64_t seed) {
    auto get = [&](const std::string& key, double fallback) {
        auto it = params.find(key);
        return it == params.end() ? fallback : it->second;
    };
    if (kind == "identity") return identity_weight(grid, static_cast<int>(get("n", 1)));
    if (kind == "scalar_power")
        return scalar_to_matrix(grid, scalar_power_weight(grid, get("alpha", 0.5), get("x0", 0.0)));
    if (kind == "diagonal_power") {
        const int n = static_cast<int>(get("n", 2));
        std::vector<Eigen::VectorXd> diag;
        for (int i = 0; i < n; ++i)
            diag.push_back(scalar_power_weight(grid, get("alpha" + std::to_string(i), 0.3 * (i + 1)), get("x0", 0.0)));
        return diagonal_weight(grid, diag);
    }
    if (kind == "bloom_rotated") {
        Eigen::VectorXd theta(grid.cells());
        const double swirl = get("swirl", 1.0);
        for (int c = 0; c < grid.cells(); ++c) theta[c] = swirl * kTwoPi * grid.cell_midpoint(c, 0);
        std::vector<Eigen::VectorXd> lams{scalar_power_weight(grid, get("alpha0", 0.3)),
                                          scalar_power_weight(grid, get("alpha1", -0.3))};
        return bloom_rotated_weight(grid, theta, lams);
    }
    if (kind == "random_logsmooth")
        return random_logsmooth_weight(grid, static_cast<int>(get("n", 2)), seed, static_cast<int>(get("modes", 3)),
                                       get("amplitude", 1.0));
    throw std::invalid_argument("make_weight: unknown kind '" + kind + "'");
}

} // namespace cbd
