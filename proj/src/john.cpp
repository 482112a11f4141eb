#include "cbd/john.hpp"

#include <cmath>
#include <stdexcept>

namespace cbd {

namespace {
constexpr double kTwoPi = 6.283185307179586476925287;
constexpr double kRankTol = 1e-10; // relative eigenvalue cutoff for degeneracy
} // namespace

double Ellipsoid::support(const Eigen::VectorXd& u) const {
    double acc = 0.0;
    for (int i = 0; i < rank; ++i) {
        const double t = semiaxes[i] * axes.col(i).dot(u);
        acc += t * t;
    }
    return std::sqrt(acc);
}

std::vector<Eigen::VectorXd> direction_net(int k, int count) {
    std::vector<Eigen::VectorXd> dirs;
    if (k == 1) {
        Eigen::VectorXd e(1);
        e[0] = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
        return dirs;
    }
    if (k == 2) {
        for (int i = 0; i < count; ++i) {
            const double th = kTwoPi * i / count;
            Eigen::VectorXd u(2);
            u << std::cos(th), std::sin(th);
            dirs.push_back(u);
        }
        return dirs;
    }
    if (k == 3) {
        // Fibonacci sphere
        const double golden = (1.0 + std::sqrt(5.0)) / 2.0;
        for (int i = 0; i < count; ++i) {
            const double z = 1.0 - (2.0 * i + 1.0) / count;
            const double rad = std::sqrt(std::max(0.0, 1.0 - z * z));
            const double th = kTwoPi * i / golden;
            Eigen::VectorXd u(3);
            u << rad * std::cos(th), rad * std::sin(th), z;
            dirs.push_back(u);
        }
        return dirs;
    }
    std::uint64_t state = 0xD1CEB00CULL + static_cast<std::uint64_t>(k);
    auto next = [&state]() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    auto unif = [&]() { return static_cast<double>(next() >> 11) * 0x1.0p-53; };
    while (static_cast<int>(dirs.size()) < count) {
        Eigen::VectorXd v(k);
        for (int i = 0; i < k; ++i) {
            double u1 = std::max(unif(), 1e-300), u2 = unif();
            v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
        }
        const double s = v.norm();
        if (s > 0) dirs.push_back(v / s);
    }
    return dirs;
}

namespace {

struct KhachiyanOut {
    Eigen::MatrixXd M; // convex combination sum lambda_j s_j s_j^t
    double gmax = 1.0; // max_j s_j^t M^{-1} s_j at termination
    int iterations = 0;
    bool converged = true;
};

// Maximize log det(sum_j lambda_j s_j s_j^t) over the simplex; the optimality
// gap is measured by g_j = s_j^t M^{-1} s_j <= k(1+eps). Frank-Wolfe steps with
// away steps (Todd-Yildirim) and Kumar-Yildirim initialization.
KhachiyanOut khachiyan_symmetric(const Eigen::MatrixXd& pts, double eps, int max_iters = 200000) {
    const int k = static_cast<int>(pts.rows());
    const int N = static_cast<int>(pts.cols());
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(N);

    // Kumar-Yildirim init: extreme points along successively orthogonalized directions.
    {
        Eigen::MatrixXd basis(k, 0);
        for (int step = 0; step < k; ++step) {
            Eigen::VectorXd u;
            if (basis.cols() == 0) {
                u = Eigen::VectorXd::Zero(k);
                u[step % k] = 1.0;
            } else {
                Eigen::MatrixXd Qb = Eigen::HouseholderQR<Eigen::MatrixXd>(basis).householderQ();
                u = Qb.col(basis.cols());
            }
            int jbest = 0;
            double vbest = -1.0;
            for (int j = 0; j < N; ++j) {
                const double v = std::abs(u.dot(pts.col(j)));
                if (v > vbest) {
                    vbest = v;
                    jbest = j;
                }
            }
            basis.conservativeResize(k, basis.cols() + 1);
            basis.col(basis.cols() - 1) = vbest > 0 ? pts.col(jbest) : u;
            lambda[jbest] += 1.0;
        }
        lambda /= lambda.sum();
    }

    auto assemble = [&](const Eigen::VectorXd& lam) {
        Eigen::MatrixXd M = Eigen::MatrixXd::Zero(k, k);
        for (int j = 0; j < N; ++j)
            if (lam[j] > 0) M.noalias() += lam[j] * pts.col(j) * pts.col(j).transpose();
        return M;
    };

    Eigen::MatrixXd M = assemble(lambda);
    KhachiyanOut out;
    Eigen::VectorXd g(N);
    const double kd = static_cast<double>(k);
    int it = 0;
    for (; it < max_iters; ++it) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
        if (ldlt.info() != Eigen::Success) {
            M += 1e-300 * Eigen::MatrixXd::Identity(k, k);
            ldlt.compute(M);
        }
        const Eigen::MatrixXd R = ldlt.solve(pts);
        for (int j = 0; j < N; ++j) g[j] = pts.col(j).dot(R.col(j));

        int jmax = 0;
        g.maxCoeff(&jmax);
        double gmin = std::numeric_limits<double>::infinity();
        int jmin = -1;
        for (int j = 0; j < N; ++j)
            if (lambda[j] > 1e-16 && g[j] < gmin) {
                gmin = g[j];
                jmin = j;
            }
        out.gmax = g[jmax];
        if (g[jmax] <= kd * (1.0 + eps)) {
            out.converged = true;
            break;
        }

        const bool away = jmin >= 0 && (kd - gmin) > (g[jmax] - kd) && lambda[jmin] < 1.0;
        const int j = away ? jmin : jmax;
        const double gj = g[j];
        double beta = (gj - kd) / (gj * (kd - 1.0));
        if (away) beta = std::max(beta, -lambda[j] / (1.0 - lambda[j]));
        const double tau = beta / (1.0 + beta);
        if (std::abs(tau) < 1e-18) break; // stalled at numerical precision
        lambda *= (1.0 - tau);
        lambda[j] += tau;
        M = (1.0 - tau) * M + tau * pts.col(j) * pts.col(j).transpose();
        if ((it + 1) % 4096 == 0) M = assemble(lambda); // refresh accumulated drift
    }
    out.converged = out.gmax <= kd * (1.0 + eps) * (1.0 + 1e-12);
    out.iterations = it;
    out.M = M;
    return out;
}

} // namespace

MveeResult mvee(const ConvexBody& K, double eps_mvee, int net_directions) {
    if (!(eps_mvee > 0.0 && eps_mvee <= 0.1)) throw std::invalid_argument("mvee: eps_mvee must be in (0, 0.1]");
    const int n = K.n();
    MveeResult res;
    res.ellipsoid.axes = Eigen::MatrixXd::Identity(n, n);
    res.ellipsoid.semiaxes = Eigen::VectorXd::Zero(n);
    res.ellipsoid.rank = 0;
    if (K.is_zero()) return res;

    // Span of the body from the second-moment matrix of the atoms.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(K.moment_matrix());
    const Eigen::VectorXd evals = es.eigenvalues();
    const double emax = evals.maxCoeff();
    int rank = 0;
    Eigen::MatrixXd axes(n, n);
    for (int i = 0; i < n; ++i) {
        const int src = n - 1 - i; // descending
        axes.col(i) = es.eigenvectors().col(src);
        if (evals[src] > kRankTol * emax) ++rank;
    }
    const Eigen::MatrixXd span = axes.leftCols(rank);

    // Point set in span coordinates.
    Eigen::MatrixXd pts;
    if (K.zonogon_exact() && rank == n) {
        const auto verts = K.zonogon_vertices();
        pts.resize(n, static_cast<int>(verts.size()));
        for (std::size_t j = 0; j < verts.size(); ++j)
            pts.col(static_cast<int>(j)) = span.transpose() * verts[j];
    } else if (K.p() == 1.0 && K.m() == 1 && rank <= 2) {
        // Degenerate zonogon: enumerate vertices inside the span.
        Eigen::MatrixXd vals(K.atom_count(), rank);
        for (int a = 0; a < K.atom_count(); ++a)
            vals.row(a) = (span.transpose() * K.atom_values().row(a).head(n).transpose()).transpose();
        ConvexBody reduced(rank, 1, 1.0, K.r(), vals, K.weights());
        const auto verts = reduced.zonogon_vertices();
        pts.resize(rank, static_cast<int>(verts.size()));
        for (std::size_t j = 0; j < verts.size(); ++j) pts.col(static_cast<int>(j)) = verts[j];
    } else {
        int count = net_directions;
        if (count <= 0) count = std::max(static_cast<int>(std::pow(4.0, rank)) * rank, 8 * rank);
        auto dirs = direction_net(rank, count);
        pts.resize(rank, static_cast<int>(dirs.size()));
        for (std::size_t j = 0; j < dirs.size(); ++j) {
            const Eigen::VectorXd u = span * dirs[j];
            pts.col(static_cast<int>(j)) = span.transpose() * K.support_point(u);
        }
    }
    res.point_count = static_cast<int>(pts.cols());

    Eigen::VectorXd semi = Eigen::VectorXd::Zero(n);
    if (rank == 1) {
        semi[0] = pts.row(0).cwiseAbs().maxCoeff();
        res.outer_ratio = 1.0;
        res.iterations = 0;
    } else {
        const KhachiyanOut kh = khachiyan_symmetric(pts, eps_mvee);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> em(kh.M);
        Eigen::MatrixXd span_rot(n, rank);
        Eigen::VectorXd mu = em.eigenvalues().cwiseMax(0.0);
        for (int i = 0; i < rank; ++i) {
            const int src = rank - 1 - i;
            span_rot.col(i) = span * em.eigenvectors().col(src);
            semi[i] = std::sqrt(mu[src]);
        }
        axes.leftCols(rank) = span_rot;
        res.outer_ratio = std::sqrt(std::max(1.0, kh.gmax));
        res.iterations = kh.iterations;
        res.converged = kh.converged;
    }

    res.ellipsoid.axes = axes;
    res.ellipsoid.semiaxes = semi;
    res.ellipsoid.rank = rank;
    return res;
}

RoundingMap round_transform(const Ellipsoid& e) {
    if (e.rank == 0) throw std::runtime_error("zero body: domination trivially holds with constant 0");
    const int n = static_cast<int>(e.axes.rows());
    RoundingMap map;
    map.rank = e.rank;
    map.forward = Eigen::MatrixXd::Zero(n, n);
    map.inverse_t = Eigen::MatrixXd::Zero(n, n);
    map.projector = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd u = e.axes.col(i);
        if (i < e.rank) {
            map.forward.noalias() += (1.0 / e.semiaxes[i]) * u * u.transpose();
            map.inverse_t.noalias() += e.semiaxes[i] * u * u.transpose();
            map.projector.noalias() += u * u.transpose();
        } else {
            map.forward.noalias() += u * u.transpose();
            map.inverse_t.noalias() += u * u.transpose();
        }
    }
    return map;
}

} // namespace cbd
