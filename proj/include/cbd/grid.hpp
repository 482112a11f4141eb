#pragma once

#include <Eigen/Dense>

#include <functional>
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace cbd {

inline constexpr double kInfExponent = std::numeric_limits<double>::infinity();

// Conjugate exponent x' with 1/x + 1/x' = 1; handles 1 <-> inf.
double dual_exponent(double x);

// l^r norm of a vector, r in [1, inf].
double lr_norm(const Eigen::VectorXd& v, double r);

// Norming functional xi of v in the dual l^{r'}: ||xi||_{r'} = 1 and
// <v, xi> = ||v||_r. Ties and the zero vector resolve deterministically
// (signs break toward +1, argmax toward the lowest index).
Eigen::VectorXd lr_norming(const Eigen::VectorXd& v, double r);

// A dyadic cube: level ell and lattice corner indices modulo 2^ell.
// iy stays 0 on one-dimensional grids.
struct Cube {
    int level = 0;
    int ix = 0;
    int iy = 0;

    bool operator==(const Cube& o) const { return level == o.level && ix == o.ix && iy == o.iy; }
};

// Dyadic cube system of the periodic torus [0,1)^d, d in {1,2}, with depth L.
// Level-l cubes partition the torus for every 0 <= l <= L; leaf cells live at
// level L. The root cube is the whole torus.
class DyadicGrid {
public:
    DyadicGrid(int dim, int depth);

    int dim() const { return dim_; }
    int depth() const { return depth_; }
    int cells() const { return cells_; }
    int cells_per_side() const { return 1 << depth_; }
    double cell_measure() const { return 1.0 / static_cast<double>(cells_); }

    Cube root() const { return Cube{0, 0, 0}; }
    bool contains(const Cube& q) const;
    double measure(const Cube& q) const;
    int side_cells(const Cube& q) const { return 1 << (depth_ - q.level); }
    int cell_count(const Cube& q) const;

    // Linear index of a leaf cell; row-major (iy * side + ix) for d = 2.
    int cell_index(int cx, int cy = 0) const;
    double cell_midpoint(int cell, int axis = 0) const;
    // torus distance between cell midpoints
    double cell_distance(int a, int b) const;

    std::vector<int> cells_of(const Cube& q) const;
    // Cells of the concentric dilation 3Q (periodic wraparound); 3Q0 = Q0.
    std::vector<int> triple_cells(const Cube& q) const;

    Cube parent(const Cube& q) const;
    // Throws "resolution exhausted" below depth L.
    std::vector<Cube> children(const Cube& q) const;
    // D(Q): all dyadic subcubes of Q, including Q itself.
    std::vector<Cube> descendants(const Cube& q) const;
    std::vector<Cube> all_cubes() const { return descendants(root()); }

    // Antichain of maximal cubes in D(Q) satisfying pred: no returned cube
    // contains another, and every satisfying cube lies inside a returned one.
    std::vector<Cube> maximal_cubes(const Cube& q, const std::function<bool(const Cube&)>& pred) const;

    Cube leaf_cube(int cell) const;
    // The level-l ancestor cube of a leaf cell.
    Cube ancestor(int cell, int level) const;
    bool cube_contains(const Cube& q, const Cube& inner) const;

    // Dense enumeration of all cubes; ids are stable for a fixed (d, L).
    int cube_count() const { return cube_count_; }
    int cube_id(const Cube& q) const;

private:
    int dim_;
    int depth_;
    int cells_;
    int cube_count_;
    std::vector<int> level_offset_;
};

// Samples of a function on the leaf cells of a dyadic grid, valued in E^n
// with E = (R^m, l^r). n = m = 1 recovers scalar functions. Storage is one
// row per cell, columns (i*m + j) for outer index i and inner index j.
class GridFunction {
public:
    GridFunction(const DyadicGrid& grid, int n, int m = 1, double r = 2.0);

    static GridFunction scalar(const DyadicGrid& grid, const Eigen::VectorXd& values);

    const DyadicGrid& grid() const { return *grid_; }
    int n() const { return n_; }
    int m() const { return m_; }
    double r() const { return r_; }

    double& at(int cell, int i, int j = 0) { return data_(cell, i * m_ + j); }
    double at(int cell, int i, int j = 0) const { return data_(cell, i * m_ + j); }

    Eigen::MatrixXd& data() { return data_; }
    const Eigen::MatrixXd& data() const { return data_; }

    // E-valued block of component i at a cell.
    Eigen::VectorXd value(int cell, int i) const;
    // ||f_i(x)||_E for every cell x.
    Eigen::VectorXd component_norms(int i) const;
    GridFunction component(int i) const;
    // (R f)_a = sum_i R(a,i) f_i; R may be rectangular (projections allowed).
    GridFunction outer_transform(const Eigen::MatrixXd& R) const;
    // max over cells of the E^n norm (l^2 combination of component E-norms).
    double sup_norm() const;

    GridFunction with_inner_exponent(double r) const;

    void save_csv(std::ostream& os) const;
    static GridFunction load_csv(std::istream& is, const DyadicGrid& grid);
    void save_binary(std::ostream& os) const;
    static GridFunction load_binary(std::istream& is, const DyadicGrid& grid);

private:
    const DyadicGrid* grid_;
    int n_;
    int m_;
    double r_;
    Eigen::MatrixXd data_;
};

// ||f||_{avL^p(Q;E)} = (|Q|^{-1} sum_{cells x in Q} |cell| ||f(x)||_E^p)^{1/p},
// p in [1, inf). Requires a single outer component.
double local_norm(const GridFunction& f, int component, const Cube& q, double p);
double local_norm(const GridFunction& f, const Cube& q, double p);
// Same normalized norm over an explicit cell set (e.g. the cells of 3Q).
double local_norm_cells(const GridFunction& f, int component, const std::vector<int>& cells, double p);

} // namespace cbd
