#pragma once

#include "cbd/grid.hpp"

#include <iosfwd>
#include <vector>

namespace cbd {

// The symmetric convex body <<f>>_{X} subset of R^n generated by a vector of
// E-valued atoms: K = { v : v_i = sum_a w_a <F_a e_i, phi_a>, N*(phi) <= 1 }
// for the weighted norm N(g) = (sum_a w_a ||g_a||_{l^r}^p)^{1/p}. The support
// function is exact: h_K(u) = N(u . F) for every direction u.
//
// For X = avL^p(Q;E) the atoms are the cells of Q with w_a = |cell|/|Q|; for
// the unnormalised L^p(Q;E) they carry w_a = |cell|.
class ConvexBody {
public:
    ConvexBody(int n, int m, double p, double r, Eigen::MatrixXd atom_values, Eigen::VectorXd weights);

    int n() const { return n_; }
    int m() const { return m_; }
    double p() const { return p_; }
    double r() const { return r_; }
    int atom_count() const { return static_cast<int>(weights_.size()); }
    const Eigen::MatrixXd& atom_values() const { return vals_; }
    const Eigen::VectorXd& weights() const { return weights_; }
    bool is_zero() const;

    // h_K(u) = max{ u.x : x in K }; positively homogeneous and subadditive.
    double support(const Eigen::VectorXd& u) const;
    // A boundary point v in K with u.v = h_K(u) (the Hoelder equality case).
    Eigen::VectorXd support_point(const Eigen::VectorXd& u) const;

    // The body R K; h_{RK}(u) = h_K(R^t u). R may be singular (projections).
    ConvexBody linear_image(const Eigen::MatrixXd& R) const;

    // Regimes with exact dot products.
    bool zonogon_exact() const { return p_ == 1.0 && m_ == 1 && n_ <= 2; }
    bool ellipsoid_exact() const { return p_ == 2.0 && (r_ == 2.0 || m_ == 1); }

    // Vertices of the zonogon (n <= 2, p = 1, E = R); one representative per
    // antipodal pair plus its mirror.
    std::vector<Eigen::VectorXd> zonogon_vertices() const;
    // Gram matrix G with h(u)^2 = u^t G u in the Hilbert regime (p = r = 2).
    Eigen::MatrixXd gram() const;

    // Second-moment matrix sum_a F_a F_a^t; its column space is span(K).
    Eigen::MatrixXd moment_matrix() const;

    void dump_atoms_csv(std::ostream& os) const;

private:
    int n_;
    int m_;
    double p_;
    double r_;
    Eigen::MatrixXd vals_;    // atoms x (n*m), row-major blocks per atom
    Eigen::VectorXd weights_; // nonnegative atom weights
};

struct DotResult {
    double value = 0.0;
    bool exact = false;
};

// Right endpoint of the Minkowski dot product A.B = [-c, c]. Exact when one
// side is a zonogon (p=1, E=R, n<=2), when n=1, or when both sides live in
// the Hilbert regime (p=2, r=2); otherwise a certified lower bound from
// alternating dual ascent over deterministic multi-starts.
DotResult dot(const ConvexBody& A, const ConvexBody& B);

// Lower bound only, regardless of regime (the ascent path).
double dot_ascent(const ConvexBody& A, const ConvexBody& B);

// Enumeration oracle: requires one side with p = 1, E = R and at most
// max_atoms atoms, whose extreme dual elements are the sign patterns.
double dot_exhaustive_signs(const ConvexBody& A, const ConvexBody& B, int max_atoms = 20);

// Bodies of grid functions.
ConvexBody body_avLp(const GridFunction& f, const Cube& q, double p);
ConvexBody body_avLp_cells(const GridFunction& f, const std::vector<int>& cells, double p);
ConvexBody body_Lp(const GridFunction& f, const Cube& q, double p);
ConvexBody body_Lp_cells(const GridFunction& f, const std::vector<int>& cells, double p);

} // namespace cbd
