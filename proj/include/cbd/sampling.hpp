#pragma once

#include "cbd/grid.hpp"
#include "cbd/rng.hpp"

namespace cbd {

// Deterministic random data generators shared by the test suites and the CLI.

inline GridFunction random_gaussian_function(const DyadicGrid& grid, int n, int m, double r, Rng& rng) {
    GridFunction f(grid, n, m, r);
    for (int c = 0; c < grid.cells(); ++c)
        for (int k = 0; k < n * m; ++k) f.data()(c, k) = rng.normal();
    return f;
}

inline GridFunction random_uniform_function(const DyadicGrid& grid, int n, int m, double r, Rng& rng, double lo,
                                            double hi) {
    GridFunction f(grid, n, m, r);
    for (int c = 0; c < grid.cells(); ++c)
        for (int k = 0; k < n * m; ++k) f.data()(c, k) = rng.uniform(lo, hi);
    return f;
}

// Nonnegative symbol with log-type oscillation: |log dist(x, x0)| damped by a
// smooth random trigonometric perturbation. BMO-bounded uniformly in L.
inline Eigen::VectorXd random_bmo_symbol(const DyadicGrid& grid, Rng& rng) {
    const double x0 = rng.uniform();
    const double amp = 0.2 + 0.6 * rng.uniform();
    const double phase = rng.uniform();
    Eigen::VectorXd b(grid.cells());
    for (int c = 0; c < grid.cells(); ++c) {
        const double x = grid.cell_midpoint(c, 0);
        double d = std::abs(x - x0);
        d = std::min(d, 1.0 - d);
        d = std::max(d, 0.5 * grid.cell_measure());
        b[c] = std::abs(std::log(d)) + amp * (1.0 + std::sin(6.283185307179586 * (x + phase)));
    }
    return b;
}

// Smooth bounded symbol (finite BMO with small norm).
inline Eigen::VectorXd random_smooth_symbol(const DyadicGrid& grid, Rng& rng, int modes = 4) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(grid.cells());
    for (int k = 1; k <= modes; ++k) {
        const double ck = rng.normal() / k;
        const double sk = rng.normal() / k;
        for (int c = 0; c < grid.cells(); ++c) {
            const double x = grid.cell_midpoint(c, 0);
            b[c] += ck * std::cos(6.283185307179586 * k * x) + sk * std::sin(6.283185307179586 * k * x);
        }
    }
    return b;
}

} // namespace cbd
