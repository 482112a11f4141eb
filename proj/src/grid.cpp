#include "cbd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace cbd {

double dual_exponent(double x) {
    if (x == 1.0) return kInfExponent;
    if (x == kInfExponent) return 1.0;
    return x / (x - 1.0);
}

double lr_norm(const Eigen::VectorXd& v, double r) {
    if (v.size() == 1) return std::abs(v[0]);
    if (r == 1.0) return v.lpNorm<1>();
    if (r == 2.0) return v.norm();
    if (r == kInfExponent) return v.lpNorm<Eigen::Infinity>();
    double acc = 0.0;
    for (int j = 0; j < v.size(); ++j) acc += std::pow(std::abs(v[j]), r);
    return std::pow(acc, 1.0 / r);
}

namespace {
inline double sign_plus(double x) { return x < 0.0 ? -1.0 : 1.0; }
} // namespace

Eigen::VectorXd lr_norming(const Eigen::VectorXd& v, double r) {
    const int m = static_cast<int>(v.size());
    Eigen::VectorXd xi = Eigen::VectorXd::Zero(m);
    if (r == 1.0) {
        for (int j = 0; j < m; ++j) xi[j] = sign_plus(v[j]);
        return xi;
    }
    if (r == kInfExponent) {
        int jmax = 0;
        for (int j = 1; j < m; ++j)
            if (std::abs(v[j]) > std::abs(v[jmax])) jmax = j;
        xi[jmax] = sign_plus(v[jmax]);
        return xi;
    }
    const double s = lr_norm(v, r);
    if (s == 0.0) {
        xi[0] = 1.0;
        return xi;
    }
    for (int j = 0; j < m; ++j) xi[j] = sign_plus(v[j]) * std::pow(std::abs(v[j]) / s, r - 1.0);
    return xi;
}

DyadicGrid::DyadicGrid(int dim, int depth) : dim_(dim), depth_(depth) {
    if (dim != 1 && dim != 2) throw std::invalid_argument("DyadicGrid: dim must be 1 or 2");
    if (depth < 0 || depth > 30 / dim) throw std::invalid_argument("DyadicGrid: depth out of range");
    cells_ = 1 << (dim_ * depth_);
    level_offset_.resize(depth_ + 2, 0);
    for (int l = 0; l <= depth_; ++l) level_offset_[l + 1] = level_offset_[l] + (1 << (dim_ * l));
    cube_count_ = level_offset_[depth_ + 1];
}

bool DyadicGrid::contains(const Cube& q) const {
    if (q.level < 0 || q.level > depth_) return false;
    const int side = 1 << q.level;
    if (q.ix < 0 || q.ix >= side) return false;
    if (dim_ == 1) return q.iy == 0;
    return q.iy >= 0 && q.iy < side;
}

double DyadicGrid::measure(const Cube& q) const {
    return std::ldexp(1.0, -dim_ * q.level);
}

int DyadicGrid::cell_count(const Cube& q) const {
    const int s = side_cells(q);
    return dim_ == 1 ? s : s * s;
}

int DyadicGrid::cell_index(int cx, int cy) const {
    return dim_ == 1 ? cx : cy * cells_per_side() + cx;
}

double DyadicGrid::cell_midpoint(int cell, int axis) const {
    const int side = cells_per_side();
    const int c = (dim_ == 1 || axis == 0) ? cell % side : cell / side;
    return (c + 0.5) / static_cast<double>(side);
}

double DyadicGrid::cell_distance(int a, int b) const {
    auto axis_dist = [&](int axis) {
        double d = std::abs(cell_midpoint(a, axis) - cell_midpoint(b, axis));
        return std::min(d, 1.0 - d);
    };
    if (dim_ == 1) return axis_dist(0);
    return std::max(axis_dist(0), axis_dist(1));
}

std::vector<int> DyadicGrid::cells_of(const Cube& q) const {
    if (!contains(q)) throw std::invalid_argument("cells_of: cube not in grid");
    const int s = side_cells(q);
    std::vector<int> out;
    out.reserve(cell_count(q));
    if (dim_ == 1) {
        for (int c = q.ix * s; c < (q.ix + 1) * s; ++c) out.push_back(c);
        return out;
    }
    for (int y = q.iy * s; y < (q.iy + 1) * s; ++y)
        for (int x = q.ix * s; x < (q.ix + 1) * s; ++x) out.push_back(cell_index(x, y));
    return out;
}

std::vector<int> DyadicGrid::triple_cells(const Cube& q) const {
    if (!contains(q)) throw std::invalid_argument("triple_cells: cube not in grid");
    const int side = 1 << q.level;
    std::vector<char> mask(static_cast<std::size_t>(cells_), 0);
    for (int dy = -1; dy <= 1; ++dy) {
        if (dim_ == 1 && dy != 0) continue;
        for (int dx = -1; dx <= 1; ++dx) {
            Cube nb{q.level, ((q.ix + dx) % side + side) % side, dim_ == 1 ? 0 : ((q.iy + dy) % side + side) % side};
            for (int c : cells_of(nb)) mask[static_cast<std::size_t>(c)] = 1;
        }
    }
    std::vector<int> out;
    for (int c = 0; c < cells_; ++c)
        if (mask[static_cast<std::size_t>(c)]) out.push_back(c);
    return out;
}

Cube DyadicGrid::parent(const Cube& q) const {
    if (q.level == 0) throw std::invalid_argument("parent: root cube has no parent");
    return Cube{q.level - 1, q.ix / 2, q.iy / 2};
}

std::vector<Cube> DyadicGrid::children(const Cube& q) const {
    if (q.level >= depth_) throw std::out_of_range("resolution exhausted: no children below depth L");
    std::vector<Cube> out;
    if (dim_ == 1) {
        out.push_back(Cube{q.level + 1, 2 * q.ix, 0});
        out.push_back(Cube{q.level + 1, 2 * q.ix + 1, 0});
        return out;
    }
    for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx) out.push_back(Cube{q.level + 1, 2 * q.ix + dx, 2 * q.iy + dy});
    return out;
}

std::vector<Cube> DyadicGrid::descendants(const Cube& q) const {
    std::vector<Cube> out{q};
    std::size_t head = 0;
    while (head < out.size()) {
        const Cube cur = out[head++];
        if (cur.level < depth_)
            for (const Cube& c : children(cur)) out.push_back(c);
    }
    return out;
}

std::vector<Cube> DyadicGrid::maximal_cubes(const Cube& q, const std::function<bool(const Cube&)>& pred) const {
    std::vector<Cube> out;
    std::vector<Cube> stack{q};
    while (!stack.empty()) {
        const Cube cur = stack.back();
        stack.pop_back();
        if (pred(cur)) {
            out.push_back(cur);
        } else if (cur.level < depth_) {
            for (const Cube& c : children(cur)) stack.push_back(c);
        }
    }
    return out;
}

Cube DyadicGrid::leaf_cube(int cell) const {
    const int side = cells_per_side();
    if (dim_ == 1) return Cube{depth_, cell, 0};
    return Cube{depth_, cell % side, cell / side};
}

Cube DyadicGrid::ancestor(int cell, int level) const {
    const Cube leaf = leaf_cube(cell);
    const int shift = depth_ - level;
    return Cube{level, leaf.ix >> shift, leaf.iy >> shift};
}

bool DyadicGrid::cube_contains(const Cube& q, const Cube& inner) const {
    if (inner.level < q.level) return false;
    const int shift = inner.level - q.level;
    return (inner.ix >> shift) == q.ix && (inner.iy >> shift) == q.iy;
}

int DyadicGrid::cube_id(const Cube& q) const {
    if (!contains(q)) throw std::invalid_argument("cube_id: cube not in grid");
    const int linear = dim_ == 1 ? q.ix : q.iy * (1 << q.level) + q.ix;
    return level_offset_[q.level] + linear;
}

GridFunction::GridFunction(const DyadicGrid& grid, int n, int m, double r)
    : grid_(&grid), n_(n), m_(m), r_(r), data_(Eigen::MatrixXd::Zero(grid.cells(), n * m)) {
    if (n < 1 || m < 1) throw std::invalid_argument("GridFunction: n and m must be >= 1");
    if (!(r >= 1.0)) throw std::invalid_argument("GridFunction: inner exponent r must be >= 1");
}

GridFunction GridFunction::scalar(const DyadicGrid& grid, const Eigen::VectorXd& values) {
    if (values.size() != grid.cells()) throw std::invalid_argument("scalar: size mismatch");
    GridFunction f(grid, 1, 1, 2.0);
    f.data_.col(0) = values;
    return f;
}

Eigen::VectorXd GridFunction::value(int cell, int i) const {
    return data_.row(cell).segment(i * m_, m_).transpose();
}

Eigen::VectorXd GridFunction::component_norms(int i) const {
    Eigen::VectorXd out(grid_->cells());
    for (int c = 0; c < grid_->cells(); ++c) out[c] = lr_norm(value(c, i), r_);
    return out;
}

GridFunction GridFunction::component(int i) const {
    GridFunction out(*grid_, 1, m_, r_);
    out.data_ = data_.middleCols(i * m_, m_);
    return out;
}

GridFunction GridFunction::outer_transform(const Eigen::MatrixXd& R) const {
    if (R.cols() != n_) throw std::invalid_argument("outer_transform: dimension mismatch");
    const int k = static_cast<int>(R.rows());
    GridFunction out(*grid_, k, m_, r_);
    for (int a = 0; a < k; ++a)
        for (int i = 0; i < n_; ++i)
            if (R(a, i) != 0.0) out.data_.middleCols(a * m_, m_) += R(a, i) * data_.middleCols(i * m_, m_);
    return out;
}

double GridFunction::sup_norm() const {
    double best = 0.0;
    for (int c = 0; c < grid_->cells(); ++c) {
        double acc = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double s = lr_norm(value(c, i), r_);
            acc += s * s;
        }
        best = std::max(best, std::sqrt(acc));
    }
    return best;
}

GridFunction GridFunction::with_inner_exponent(double r) const {
    GridFunction out(*grid_, n_, m_, r);
    out.data_ = data_;
    return out;
}

namespace {
std::string exponent_to_string(double r) {
    if (r == kInfExponent) return "inf";
    std::ostringstream os;
    os.precision(17);
    os << r;
    return os.str();
}

double exponent_from_string(const std::string& s) {
    if (s == "inf") return kInfExponent;
    return std::stod(s);
}
} // namespace

void GridFunction::save_csv(std::ostream& os) const {
    os << grid_->dim() << "," << grid_->depth() << "," << n_ << "," << m_ << "," << exponent_to_string(r_) << "\n";
    os.precision(17);
    for (int c = 0; c < grid_->cells(); ++c) {
        for (int k = 0; k < n_ * m_; ++k) {
            if (k) os << ",";
            os << data_(c, k);
        }
        os << "\n";
    }
}

GridFunction GridFunction::load_csv(std::istream& is, const DyadicGrid& grid) {
    std::string line;
    if (!std::getline(is, line)) throw std::runtime_error("load_csv: missing header");
    std::istringstream hs(line);
    std::string tok;
    std::vector<std::string> head;
    while (std::getline(hs, tok, ',')) head.push_back(tok);
    if (head.size() != 5) throw std::runtime_error("load_csv: header must be d,L,n,m,r");
    if (std::stoi(head[0]) != grid.dim() || std::stoi(head[1]) != grid.depth())
        throw std::runtime_error("load_csv: grid shape mismatch");
    GridFunction f(grid, std::stoi(head[2]), std::stoi(head[3]), exponent_from_string(head[4]));
    for (int c = 0; c < grid.cells(); ++c) {
        if (!std::getline(is, line)) throw std::runtime_error("load_csv: truncated data");
        std::istringstream ls(line);
        for (int k = 0; k < f.n_ * f.m_; ++k) {
            if (!std::getline(ls, tok, ',')) throw std::runtime_error("load_csv: short row");
            f.data_(c, k) = std::stod(tok);
        }
    }
    return f;
}

void GridFunction::save_binary(std::ostream& os) const {
    const char magic[4] = {'C', 'B', 'D', 'F'};
    os.write(magic, 4);
    const std::int32_t meta[4] = {grid_->dim(), grid_->depth(), n_, m_};
    os.write(reinterpret_cast<const char*>(meta), sizeof(meta));
    os.write(reinterpret_cast<const char*>(&r_), sizeof(r_));
    for (int c = 0; c < grid_->cells(); ++c)
        for (int k = 0; k < n_ * m_; ++k) {
            const double v = data_(c, k);
            os.write(reinterpret_cast<const char*>(&v), sizeof(v));
        }
}

GridFunction GridFunction::load_binary(std::istream& is, const DyadicGrid& grid) {
    char magic[4];
    is.read(magic, 4);
    if (!is || std::string(magic, 4) != "CBDF") throw std::runtime_error("load_binary: bad magic");
    std::int32_t meta[4];
    is.read(reinterpret_cast<char*>(meta), sizeof(meta));
    double r = 2.0;
    is.read(reinterpret_cast<char*>(&r), sizeof(r));
    if (meta[0] != grid.dim() || meta[1] != grid.depth()) throw std::runtime_error("load_binary: grid shape mismatch");
    GridFunction f(grid, meta[2], meta[3], r);
    for (int c = 0; c < grid.cells(); ++c)
        for (int k = 0; k < f.n_ * f.m_; ++k) {
            double v = 0.0;
            is.read(reinterpret_cast<char*>(&v), sizeof(v));
            f.data_(c, k) = v;
        }
    if (!is) throw std::runtime_error("load_binary: truncated data");
    return f;
}

double local_norm_cells(const GridFunction& f, int component, const std::vector<int>& cells, double p) {
    if (!(p >= 1.0) || p == kInfExponent) throw std::invalid_argument("local_norm: p must be in [1, inf)");
    const double cell = f.grid().cell_measure();
    const double total = cell * static_cast<double>(cells.size());
    double acc = 0.0;
    if (p == 1.0) {
        for (int c : cells) acc += lr_norm(f.value(c, component), f.r());
    } else if (p == 2.0) {
        for (int c : cells) {
            const double s = lr_norm(f.value(c, component), f.r());
            acc += s * s;
        }
    } else {
        for (int c : cells) acc += std::pow(lr_norm(f.value(c, component), f.r()), p);
    }
    return std::pow(acc * cell / total, 1.0 / p);
}

double local_norm(const GridFunction& f, int component, const Cube& q, double p) {
    return local_norm_cells(f, component, f.grid().cells_of(q), p);
}

double local_norm(const GridFunction& f, const Cube& q, double p) {
    if (f.n() != 1) throw std::invalid_argument("local_norm: function must have a single outer component");
    return local_norm(f, 0, q, p);
}

} // namespace cbd
