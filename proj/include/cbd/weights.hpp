#pragma once

#include "cbd/grid.hpp"
#include "cbd/rng.hpp"

#include <map>
#include <string>
#include <vector>

namespace cbd {

// Cellwise symmetric positive-definite n x n matrix field on a dyadic grid,
// with the inverse field cached at construction.
class MatrixWeight {
public:
    MatrixWeight(const DyadicGrid& grid, std::vector<Eigen::MatrixXd> cells);

    const DyadicGrid& grid() const { return *grid_; }
    int n() const { return n_; }
    const Eigen::MatrixXd& at(int cell) const { return w_[static_cast<std::size_t>(cell)]; }
    const Eigen::MatrixXd& inv_at(int cell) const { return winv_[static_cast<std::size_t>(cell)]; }

    Eigen::MatrixXd average(const std::vector<int>& cells) const;
    Eigen::MatrixXd average(const Cube& q) const;
    MatrixWeight inverse() const;

    // n x n blocks serialized like a grid function (m = n).
    GridFunction to_gridfunction() const;
    static MatrixWeight from_gridfunction(const GridFunction& f);

private:
    const DyadicGrid* grid_;
    int n_;
    std::vector<Eigen::MatrixXd> w_, winv_;
};

// Symmetric matrix powers via eigendecomposition, eigenvalues floored at
// 1e-14 times the largest one.
Eigen::MatrixXd spd_power(const Eigen::MatrixXd& a, double exponent);

struct A2Result {
    double value = 0.0;
    Cube argmax;
};

// [W,V]_{A2} = sup_Q |<W>_Q^{1/2} <V>_Q^{1/2}|^2 over all dyadic cubes.
A2Result a2_characteristic(const MatrixWeight& W, const MatrixWeight& V);
// [W]_{A2} = [W, W^{-1}]_{A2}
A2Result a2_characteristic(const MatrixWeight& W);

// [w]_{Ainf} = sup_Q (1/w(Q)) int_Q M(1_Q w), exact over the dyadic system.
double ainfty_scalar(const DyadicGrid& grid, const Eigen::VectorXd& w);

// Lower estimate of [W]_{Ainf}: max of the scalar characteristic of
// x -> e.W(x)e over a deterministic unit-direction net.
double ainfty_matrix(const MatrixWeight& W, int direction_count = 64);

// ||W^{1/p} f||_{L^p(torus;E^n)} with the l^2 combination of component E-norms.
double weighted_norm(const GridFunction& f, const MatrixWeight& W, double p);

// Generators.
MatrixWeight identity_weight(const DyadicGrid& grid, int n);
// w(x) = dist_torus(x, x0)^alpha at cell midpoints; in the A_2 range only for
// -d < alpha < d, but any exponent is allowed (the characteristic may then
// grow without bound as L increases).
Eigen::VectorXd scalar_power_weight(const DyadicGrid& grid, double alpha, double x0 = 0.0);
bool scalar_power_in_a2_range(double alpha, int dim);
MatrixWeight scalar_to_matrix(const DyadicGrid& grid, const Eigen::VectorXd& w);
MatrixWeight diagonal_weight(const DyadicGrid& grid, const std::vector<Eigen::VectorXd>& diag);
// W(x) = U(x)^t Lambda(x) U(x) with U a rotation by theta(x): weights of the
// form used to generate two-weight test data (n = 2).
MatrixWeight bloom_rotated_weight(const DyadicGrid& grid, const Eigen::VectorXd& theta,
                                  const std::vector<Eigen::VectorXd>& lambdas);
// exp of a smooth random symmetric field, deterministic under the seed.
MatrixWeight random_logsmooth_weight(const DyadicGrid& grid, int n, std::uint64_t seed, int modes = 3,
                                     double amplitude = 1.0);

// String-dispatched generator for config-driven runs. Recognized kinds:
// identity, scalar_power, diagonal_power, bloom_rotated, random_logsmooth.
MatrixWeight make_weight(const DyadicGrid& grid, const std::string& kind,
                         const std::map<std::string, double>& params, std::uint64_t seed);

} // namespace cbd
