#include "cbd/bodies.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace cbd {

namespace {

// Fixed unit directions for ascent multi-starts; deterministic across calls.
std::vector<Eigen::VectorXd> ascent_start_directions(int n, int extra = 8) {
    std::vector<Eigen::VectorXd> dirs;
    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
        e[i] = 1.0;
        dirs.push_back(e);
        dirs.push_back(-e);
    }
    std::uint64_t state = 0x8BADF00DCAFEBABEULL;
    auto next = [&state]() {
        std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    };
    auto unif = [&]() { return static_cast<double>(next() >> 11) * 0x1.0p-53; };
    for (int k = 0; k < extra; ++k) {
        Eigen::VectorXd v(n);
        for (int i = 0; i < n; ++i) {
            // Box-Muller
            const double two_pi = 6.283185307179586476925287;
            double u1 = std::max(unif(), 1e-300), u2 = unif();
            v[i] = std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
        }
        const double s = v.norm();
        if (s > 0) dirs.push_back(v / s);
    }
    return dirs;
}

} // namespace

ConvexBody::ConvexBody(int n, int m, double p, double r, Eigen::MatrixXd atom_values, Eigen::VectorXd weights)
    : n_(n), m_(m), p_(p), r_(r), vals_(std::move(atom_values)), weights_(std::move(weights)) {
    if (n_ < 1 || m_ < 1) throw std::invalid_argument("ConvexBody: bad dimensions");
    if (!(p_ >= 1.0) || p_ == kInfExponent) throw std::invalid_argument("ConvexBody: p must be in [1, inf)");
    if (!(r_ >= 1.0)) throw std::invalid_argument("ConvexBody: r must be in [1, inf]");
    if (vals_.rows() != weights_.size() || vals_.cols() != n_ * m_)
        throw std::invalid_argument("ConvexBody: atom storage shape mismatch");
    if ((weights_.array() < 0).any()) throw std::invalid_argument("ConvexBody: negative atom weight");
}

bool ConvexBody::is_zero() const {
    for (int a = 0; a < atom_count(); ++a)
        if (weights_[a] > 0 && vals_.row(a).cwiseAbs().maxCoeff() > 0) return false;
    return true;
}

double ConvexBody::support(const Eigen::VectorXd& u) const {
    if (u.size() != n_) throw std::invalid_argument("support: direction dimension mismatch");
    const int atoms = atom_count();
    double acc = 0.0;
    if (m_ == 1) {
        Eigen::VectorXd g = vals_ * u;
        if (p_ == 1.0)
            acc = (weights_.array() * g.array().abs()).sum();
        else if (p_ == 2.0)
            acc = (weights_.array() * g.array().square()).sum();
        else
            acc = (weights_.array() * g.array().abs().pow(p_)).sum();
    } else {
        Eigen::VectorXd g(m_);
        for (int a = 0; a < atoms; ++a) {
            g.setZero();
            for (int i = 0; i < n_; ++i)
                if (u[i] != 0.0) g += u[i] * vals_.row(a).segment(i * m_, m_).transpose();
            const double s = lr_norm(g, r_);
            acc += weights_[a] * (p_ == 1.0 ? s : (p_ == 2.0 ? s * s : std::pow(s, p_)));
        }
    }
    if (p_ == 1.0) return acc;
    if (p_ == 2.0) return std::sqrt(acc);
    return std::pow(acc, 1.0 / p_);
}

Eigen::VectorXd ConvexBody::support_point(const Eigen::VectorXd& u) const {
    if (u.size() != n_) throw std::invalid_argument("support_point: direction dimension mismatch");
    const int atoms = atom_count();
    Eigen::VectorXd point = Eigen::VectorXd::Zero(n_);
    Eigen::VectorXd g(m_);
    Eigen::VectorXd cell_norm(atoms);
    Eigen::MatrixXd xi(atoms, m_);
    for (int a = 0; a < atoms; ++a) {
        g.setZero();
        for (int i = 0; i < n_; ++i)
            if (u[i] != 0.0) g += u[i] * vals_.row(a).segment(i * m_, m_).transpose();
        cell_norm[a] = lr_norm(g, r_);
        xi.row(a) = lr_norming(g, r_).transpose();
    }
    if (p_ == 1.0) {
        for (int a = 0; a < atoms; ++a)
            for (int i = 0; i < n_; ++i)
                point[i] += weights_[a] * vals_.row(a).segment(i * m_, m_).dot(xi.row(a));
        return point;
    }
    double zacc = 0.0;
    for (int a = 0; a < atoms; ++a) zacc += weights_[a] * std::pow(cell_norm[a], p_);
    if (zacc <= 0.0) return point;
    const double z = std::pow(zacc, (p_ - 1.0) / p_);
    for (int a = 0; a < atoms; ++a) {
        const double scale = weights_[a] * std::pow(cell_norm[a], p_ - 1.0) / z;
        if (scale == 0.0) continue;
        for (int i = 0; i < n_; ++i)
            point[i] += scale * vals_.row(a).segment(i * m_, m_).dot(xi.row(a));
    }
    return point;
}

ConvexBody ConvexBody::linear_image(const Eigen::MatrixXd& R) const {
    if (R.rows() != R.cols() || R.cols() != n_) throw std::invalid_argument("linear_image: R must be n x n");
    Eigen::MatrixXd out(vals_.rows(), vals_.cols());
    for (int a = 0; a < atom_count(); ++a) {
        for (int i = 0; i < n_; ++i) {
            Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(m_);
            for (int k = 0; k < n_; ++k)
                if (R(i, k) != 0.0) row += R(i, k) * vals_.row(a).segment(k * m_, m_);
            out.row(a).segment(i * m_, m_) = row;
        }
    }
    return ConvexBody(n_, m_, p_, r_, std::move(out), weights_);
}

std::vector<Eigen::VectorXd> ConvexBody::zonogon_vertices() const {
    if (!zonogon_exact()) throw std::logic_error("zonogon_vertices: body is not in the zonogon regime");
    std::vector<Eigen::VectorXd> verts;
    if (n_ == 1) {
        Eigen::VectorXd one(1);
        one[0] = 1.0;
        const double h = support(one);
        Eigen::VectorXd v(1);
        v[0] = h;
        verts.push_back(v);
        verts.push_back(-v);
        return verts;
    }
    // Generators of the segment sum, flipped into the upper half-plane and
    // sorted by angle; walking the sign flips traces one boundary chain.
    std::vector<Eigen::Vector2d> gens;
    for (int a = 0; a < atom_count(); ++a) {
        Eigen::Vector2d gvec(weights_[a] * vals_(a, 0), weights_[a] * vals_(a, 1));
        if (gvec.norm() == 0.0) continue;
        if (gvec.y() < 0.0 || (gvec.y() == 0.0 && gvec.x() < 0.0)) gvec = -gvec;
        gens.push_back(gvec);
    }
    if (gens.empty()) {
        verts.push_back(Eigen::Vector2d::Zero());
        return verts;
    }
    std::sort(gens.begin(), gens.end(), [](const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
        return std::atan2(a.y(), a.x()) < std::atan2(b.y(), b.x());
    });
    Eigen::Vector2d v = Eigen::Vector2d::Zero();
    for (const auto& gvec : gens) v -= gvec;
    verts.push_back(v);
    for (const auto& gvec : gens) {
        v += 2.0 * gvec;
        verts.push_back(v);
    }
    const std::size_t half = verts.size();
    for (std::size_t i = 0; i < half; ++i) verts.push_back(-verts[i]);
    return verts;
}

Eigen::MatrixXd ConvexBody::gram() const {
    if (!ellipsoid_exact()) throw std::logic_error("gram: body is not in the Hilbert regime");
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n_, n_);
    for (int a = 0; a < atom_count(); ++a) {
        if (weights_[a] == 0.0) continue;
        for (int i = 0; i < n_; ++i)
            for (int k = i; k < n_; ++k) {
                const double v = weights_[a] * vals_.row(a).segment(i * m_, m_).dot(vals_.row(a).segment(k * m_, m_));
                G(i, k) += v;
                if (k != i) G(k, i) += v;
            }
    }
    return G;
}

Eigen::MatrixXd ConvexBody::moment_matrix() const {
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n_, n_);
    for (int a = 0; a < atom_count(); ++a)
        for (int i = 0; i < n_; ++i)
            for (int k = i; k < n_; ++k) {
                const double v = vals_.row(a).segment(i * m_, m_).dot(vals_.row(a).segment(k * m_, m_));
                G(i, k) += v;
                if (k != i) G(k, i) += v;
            }
    return G;
}

void ConvexBody::dump_atoms_csv(std::ostream& os) const {
    os << "weight";
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < m_; ++j) os << ",v" << i << "_" << j;
    os << "\n";
    os.precision(17);
    for (int a = 0; a < atom_count(); ++a) {
        os << weights_[a];
        for (int k = 0; k < n_ * m_; ++k) os << "," << vals_(a, k);
        os << "\n";
    }
}

double dot_ascent(const ConvexBody& A, const ConvexBody& B) {
    const int n = A.n();
    double best = 0.0;
    for (const Eigen::VectorXd& u0 : ascent_start_directions(n)) {
        Eigen::VectorXd a = A.support_point(u0);
        if (a.norm() == 0.0) continue;
        double val = 0.0;
        for (int sweep = 0; sweep < 200; ++sweep) {
            Eigen::VectorXd b = B.support_point(a);
            Eigen::VectorXd a2 = A.support_point(b);
            const double next = a2.dot(b);
            a = a2;
            if (next <= val + 1e-12 * std::max(1.0, std::abs(val))) {
                val = std::max(val, next);
                break;
            }
            val = next;
        }
        best = std::max(best, val);
    }
    return best;
}

namespace {

double dot_via_vertices(const ConvexBody& poly, const ConvexBody& other) {
    double best = 0.0;
    for (const Eigen::VectorXd& v : poly.zonogon_vertices()) best = std::max(best, other.support(v));
    return best;
}

double dot_via_grams(const ConvexBody& A, const ConvexBody& B) {
    const Eigen::MatrixXd GA = A.gram();
    const Eigen::MatrixXd GB = B.gram();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> esA(GA);
    Eigen::VectorXd lam = esA.eigenvalues().cwiseMax(0.0);
    Eigen::MatrixXd sqrtA = esA.eigenvectors() * lam.cwiseSqrt().asDiagonal() * esA.eigenvectors().transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sqrtA * GB * sqrtA);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

} // namespace

DotResult dot(const ConvexBody& A, const ConvexBody& B) {
    if (A.n() != B.n()) throw std::invalid_argument("dot: bodies have different outer dimension");
    if (A.is_zero() || B.is_zero()) return {0.0, true};
    if (A.n() == 1) {
        Eigen::VectorXd one(1);
        one[0] = 1.0;
        return {A.support(one) * B.support(one), true};
    }
    if (A.zonogon_exact()) return {dot_via_vertices(A, B), true};
    if (B.zonogon_exact()) return {dot_via_vertices(B, A), true};
    if (A.ellipsoid_exact() && B.ellipsoid_exact()) return {dot_via_grams(A, B), true};
    return {dot_ascent(A, B), false};
}

double dot_exhaustive_signs(const ConvexBody& A, const ConvexBody& B, int max_atoms) {
    const ConvexBody* sign_side = nullptr;
    const ConvexBody* other = nullptr;
    if (A.p() == 1.0 && A.m() == 1 && A.atom_count() <= max_atoms) {
        sign_side = &A;
        other = &B;
    } else if (B.p() == 1.0 && B.m() == 1 && B.atom_count() <= max_atoms) {
        sign_side = &B;
        other = &A;
    } else {
        throw std::invalid_argument("dot_exhaustive_signs: no side with p=1, E=R and small atom count");
    }
    const int k = sign_side->atom_count();
    const int n = sign_side->n();
    double best = 0.0;
    Eigen::VectorXd v(n);
    for (std::uint64_t mask = 0; mask < (1ULL << k); ++mask) {
        v.setZero();
        for (int a = 0; a < k; ++a) {
            const double s = (mask >> a) & 1 ? 1.0 : -1.0;
            for (int i = 0; i < n; ++i) v[i] += s * sign_side->weights()[a] * sign_side->atom_values()(a, i);
        }
        best = std::max(best, other->support(v));
    }
    return best;
}

namespace {
ConvexBody body_from_cells(const GridFunction& f, const std::vector<int>& cells, double p, bool normalized) {
    const int n = f.n(), m = f.m();
    Eigen::MatrixXd vals(static_cast<int>(cells.size()), n * m);
    for (std::size_t a = 0; a < cells.size(); ++a) vals.row(static_cast<int>(a)) = f.data().row(cells[a]);
    const double cell = f.grid().cell_measure();
    const double w = normalized ? 1.0 / static_cast<double>(cells.size()) : cell;
    Eigen::VectorXd weights = Eigen::VectorXd::Constant(static_cast<int>(cells.size()), w);
    return ConvexBody(n, m, p, f.r(), std::move(vals), std::move(weights));
}
} // namespace

ConvexBody body_avLp_cells(const GridFunction& f, const std::vector<int>& cells, double p) {
    return body_from_cells(f, cells, p, true);
}

ConvexBody body_avLp(const GridFunction& f, const Cube& q, double p) {
    return body_from_cells(f, f.grid().cells_of(q), p, true);
}

ConvexBody body_Lp_cells(const GridFunction& f, const std::vector<int>& cells, double p) {
    return body_from_cells(f, cells, p, false);
}

ConvexBody body_Lp(const GridFunction& f, const Cube& q, double p) {
    return body_from_cells(f, f.grid().cells_of(q), p, false);
}

} // namespace cbd
