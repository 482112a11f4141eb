#pragma once

#include "cbd/bodies.hpp"

namespace cbd {

// Symmetric ellipsoid stored by principal axes: h(u)^2 = sum_i (a_i u.axes_i)^2.
// Degenerate directions carry zero semiaxes; the span basis is axes.leftCols(rank).
struct Ellipsoid {
    Eigen::MatrixXd axes;     // orthonormal columns, n x n
    Eigen::VectorXd semiaxes; // descending, >= 0
    int rank = 0;

    double support(const Eigen::VectorXd& u) const;
    Eigen::MatrixXd span_basis() const { return axes.leftCols(rank); }
};

struct MveeResult {
    Ellipsoid ellipsoid;
    // Certified outer factor at the sampled points: points lie in outer_ratio * E.
    // At convergence outer_ratio <= sqrt(rank * (1 + eps)).
    double outer_ratio = 1.0;
    int iterations = 0;
    bool converged = true;
    int point_count = 0;
};

// Inscribed rounding ellipsoid E of a symmetric body K with E subset K and
// (over the sampled extreme points) K subset sqrt(n)(1+eps) E. The point set
// is exact for zonogons (p=1, E=R, n<=2) and a deterministic direction-net
// sample of support points otherwise; the circumscribed minimum-volume
// ellipsoid of the points is computed by Khachiyan barycentric ascent with
// away steps and rescaled to the inscribed one.
MveeResult mvee(const ConvexBody& K, double eps_mvee = 1e-6, int net_directions = 0);

struct RoundingMap {
    Eigen::MatrixXd forward;   // R_K: symmetric, maps E to the unit ball of its span
    Eigen::MatrixXd inverse_t; // R_K^{-t} (= R_K^{-1} on the span, identity off it)
    Eigen::MatrixXd projector; // orthogonal projector onto span(K)
    int rank = 0;
};

// Throws when rank = 0 (zero body: domination holds trivially with constant 0).
RoundingMap round_transform(const Ellipsoid& e);

// Deterministic unit-direction nets: signed axis pairs for k=1, equal angles
// for k=2, a Fibonacci sphere for k=3, seeded normalized Gaussians beyond.
std::vector<Eigen::VectorXd> direction_net(int k, int count);

} // namespace cbd
