// Continuous paths sampled on uniform dyadic grids, and the dyadic
// piecewise-linear approximation operators.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

namespace fdb {

// Path on the grid t_i = i*T/2^L, values row i = path value at t_i.
struct GridPath {
    int dim = 0;
    double horizon = 1.0;
    int level = 0;
    Eigen::MatrixXd values;  // (N+1) x dim

    GridPath() = default;
    GridPath(int d, double T, int L)
        : dim(d), horizon(T), level(L), values(Eigen::MatrixXd::Zero((1 << L) + 1, d)) {
        if (d < 1 || T <= 0.0 || L < 0) throw std::invalid_argument("GridPath: bad parameters");
    }

    int intervals() const { return 1 << level; }
    int points() const { return intervals() + 1; }
    double dt() const { return horizon / intervals(); }
    double time(int i) const { return horizon * i / intervals(); }

    Eigen::VectorXd increment(int i, int j) const {
        return (values.row(j) - values.row(i)).transpose();
    }
};

inline GridPath make_grid_path(int dim, double T, int level,
                               const std::function<Eigen::VectorXd(double)>& f) {
    GridPath p(dim, T, level);
    for (int i = 0; i <= p.intervals(); ++i) p.values.row(i) = f(p.time(i)).transpose();
    return p;
}

// The identity path lambda_t = t as a one-dimensional GridPath.
inline GridPath time_path(double T, int level) {
    GridPath p(1, T, level);
    for (int i = 0; i <= p.intervals(); ++i) p.values(i, 0) = p.time(i);
    return p;
}

inline GridPath scale_path(const GridPath& w, double c) {
    GridPath p = w;
    p.values *= c;
    return p;
}

inline GridPath add_paths(const GridPath& a, const GridPath& b) {
    if (a.dim != b.dim || a.level != b.level || a.horizon != b.horizon)
        throw std::invalid_argument("add_paths: incompatible grids");
    GridPath p = a;
    p.values += b.values;
    return p;
}

// d-dim pairing (x, k): horizontal concatenation of components.
inline GridPath join_paths(const GridPath& a, const GridPath& b) {
    if (a.level != b.level || a.horizon != b.horizon)
        throw std::invalid_argument("join_paths: incompatible grids");
    GridPath p(a.dim + b.dim, a.horizon, a.level);
    p.values << a.values, b.values;
    return p;
}

// Piecewise-linear approximation w(l): agrees with w at the 2^l+1 coarse
// dyadic times, linear in between, re-sampled on w's grid.
inline GridPath dyadic_coarsen(const GridPath& w, int l) {
    if (l > w.level) throw std::invalid_argument("dyadic_coarsen: l exceeds grid level");
    if (l == w.level) return w;
    GridPath p(w.dim, w.horizon, w.level);
    const int stride = 1 << (w.level - l);
    for (int j = 0; j < (1 << l); ++j) {
        const int i0 = j * stride, i1 = (j + 1) * stride;
        for (int s = 0; s <= stride; ++s) {
            double theta = double(s) / stride;
            p.values.row(i0 + s) = (1.0 - theta) * w.values.row(i0) + theta * w.values.row(i1);
        }
        (void)i1;
    }
    return p;
}

// Subsample onto the level-l grid (keeps every 2^(L-l)-th point).
inline GridPath restrict_to_level(const GridPath& w, int l) {
    if (l > w.level) throw std::invalid_argument("restrict_to_level: l exceeds grid level");
    GridPath p(w.dim, w.horizon, l);
    const int stride = 1 << (w.level - l);
    for (int i = 0; i <= (1 << l); ++i) p.values.row(i) = w.values.row(i * stride);
    return p;
}

// w(l_coarse) sampled on the level l_out grid (l_coarse <= l_out <= w.level).
inline GridPath coarsen_on_level(const GridPath& w, int l_coarse, int l_out) {
    if (l_coarse > l_out) throw std::invalid_argument("coarsen_on_level: l_coarse > l_out");
    return restrict_to_level(dyadic_coarsen(w, l_coarse), l_out);
}

// Linear interpolation onto a finer dyadic grid.
inline GridPath refine_to_level(const GridPath& w, int l) {
    if (l < w.level) throw std::invalid_argument("refine_to_level: l below grid level");
    if (l == w.level) return w;
    GridPath p(w.dim, w.horizon, l);
    const int split = 1 << (l - w.level);
    for (int i = 0; i < w.intervals(); ++i)
        for (int s = 0; s <= split; ++s) {
            double theta = (double)s / split;
            p.values.row(i * split + s) =
                (1.0 - theta) * w.values.row(i) + theta * w.values.row(i + 1);
        }
    return p;
}

// Resample onto an arbitrary dyadic level (restriction or linear refinement).
inline GridPath resample_to_level(const GridPath& w, int l) {
    return l <= w.level ? restrict_to_level(w, l) : refine_to_level(w, l);
}

// Sub-path over grid indices [i0, i1] re-anchored as its own GridPath.
// The index range must span a dyadic count of intervals.
inline GridPath sub_path(const GridPath& w, int i0, int i1) {
    const int n = i1 - i0;
    if (n <= 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("sub_path: index range must be a positive power of two");
    int l = 0;
    while ((1 << l) < n) ++l;
    GridPath p(w.dim, w.horizon * n / w.intervals(), l);
    p.values = w.values.middleRows(i0, n + 1);
    return p;
}

}  // namespace fdb
