#include "fdb/path_norms.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fdb {

std::vector<std::pair<int, int>> PairSet::exhaustive(int n) {
    std::vector<std::pair<int, int>> out;
    out.reserve((size_t)n * (n + 1) / 2);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j <= n; ++j) out.emplace_back(i, j);
    return out;
}

std::vector<std::pair<int, int>> PairSet::ladder(int n) {
    std::vector<int> ks;
    for (int k = 1; k <= std::min(16, n); ++k) ks.push_back(k);
    for (int k = 32; k < n; k *= 2) ks.push_back(k);
    if (n > 16) ks.push_back(n);
    std::vector<std::pair<int, int>> out;
    for (int k : ks)
        for (int i = 0; i + k <= n; ++i) out.emplace_back(i, i + k);
    return out;
}

std::vector<std::pair<int, int>> PairSet::automatic(int n) {
    return n <= 256 ? exhaustive(n) : ladder(n);
}

double holder_norm(const TwoParamFunction& eta, double gamma,
                   const std::vector<std::pair<int, int>>& pairs, double horizon) {
    if (gamma <= 0.0 || gamma > 3.0) throw std::invalid_argument("holder_norm: gamma in (0,3]");
    const double dt = horizon / eta.grid_intervals;
    double sup = 0.0;
    for (auto [i, j] : pairs) {
        double v = eta.abs_value(i, j);
        if (v == 0.0) continue;
        sup = std::max(sup, v / std::pow((j - i) * dt, gamma));
    }
    return sup;
}

double holder_norm(const TwoParamFunction& eta, double gamma, double horizon) {
    return holder_norm(eta, gamma, PairSet::automatic(eta.grid_intervals), horizon);
}

void check_besov_params(double alpha, double m) {
    // alpha - 1/m > 0 (the path-space embedding condition) is advisory here:
    // the quadrature itself is defined for every alpha > 0, m >= 1.
    if (m < 1.0) throw std::invalid_argument("besov_norm: m >= 1 required");
    if (alpha <= 0.0) throw std::invalid_argument("besov_norm: alpha > 0 required");
}

bool besov_embedding_condition_ok(double alpha, double m) {
    return m >= 1.0 && alpha - 1.0 / m > 0.0;
}

bool besov_rough_condition_ok(double alpha, double m) {
    if (alpha <= 0.25 || alpha > 0.5) return false;
    int k = (int)std::floor(1.0 / alpha);
    return alpha - 1.0 / (12.0 * m) > 1.0 / (k + 1);
}

namespace {

// Antiderivative of z^p, with the log special case.
double power_int(double z1, double z2, double p) {
    if (std::abs(p + 1.0) < 1e-13) return std::log(z2 / z1);
    return (std::pow(z2, p + 1.0) - std::pow(z1, p + 1.0)) / (p + 1.0);
}

// Integral of hat(z) * z^c over the admissible part of a gap-g cell, where
// hat(z) = dt - |z - g*dt| and the region clips to z >= dt.
double cell_weight(int g, double dt, double c) {
    if (g == 1) {
        // descending branch only: (2dt - z) on [dt, 2dt]
        return 2.0 * dt * power_int(dt, 2.0 * dt, c) - power_int(dt, 2.0 * dt, c + 1.0);
    }
    double lo = (g - 1) * dt, mid = g * dt, hi = (g + 1) * dt;
    double rising = power_int(lo, mid, c + 1.0) - lo * power_int(lo, mid, c);
    double falling = hi * power_int(mid, hi, c) - power_int(mid, hi, c + 1.0);
    return rising + falling;
}

}  // namespace

std::vector<double> besov_cell_weights(int n, double alpha, double m, double horizon) {
    const double dt = horizon / n;
    const double c = -1.0 - alpha * m;
    std::vector<double> w(n);
    w[0] = 0.0;
    for (int g = 1; g < n; ++g) w[g] = cell_weight(g, dt, c);
    return w;
}

double besov_norm(const TwoParamFunction& eta, double alpha, double m, double horizon) {
    check_besov_params(alpha, m);
    const int n = eta.grid_intervals;
    const std::vector<double> w = besov_cell_weights(n, alpha, m, horizon);
    double acc = 0.0;
    for (int g = 1; g < n; ++g) {
        double sum_g = 0.0;
        for (int i = 0; i + g < n; ++i) {
            double v = eta.abs_value(i, i + g);
            if (v != 0.0) sum_g += std::pow(v, m);
        }
        acc += w[g] * sum_g;
    }
    return std::pow(acc, 1.0 / m);
}

double pvar_norm(const GridPath& path, double p, int s_index, int t_index) {
    if (p < 1.0) throw std::invalid_argument("pvar_norm: p >= 1 required");
    if (s_index < 0 || t_index > path.intervals() || s_index > t_index)
        throw std::invalid_argument("pvar_norm: bad index range");
    const int n = t_index - s_index;
    if (n == 0) return 0.0;
    // best[j] = sup over partitions of [s, s+j] of sum |increment|^p
    std::vector<double> best(n + 1, 0.0);
    for (int j = 1; j <= n; ++j) {
        double b = 0.0;
        for (int i = 0; i < j; ++i) {
            double step = std::pow(path.increment(s_index + i, s_index + j).norm(), p);
            b = std::max(b, best[i] + step);
        }
        best[j] = b;
    }
    return std::pow(best[n], 1.0 / p);
}

double pvar_norm(const GridPath& path, double p) {
    return pvar_norm(path, p, 0, path.intervals());
}

namespace {

double level_entry_abs(const GroupTensorD& g, int level_i) {
    switch (level_i) {
        case 1: return g.level1.lpNorm<Eigen::Infinity>();
        case 2: return g.level2.lpNorm<Eigen::Infinity>();
        default: return g.level3.lpNorm<Eigen::Infinity>();
    }
}

double level_entry_abs_diff(const GroupTensorD& g, const GroupTensorD& h, int level_i) {
    switch (level_i) {
        case 1: return (g.level1 - h.level1).lpNorm<Eigen::Infinity>();
        case 2: return (g.level2 - h.level2).lpNorm<Eigen::Infinity>();
        default: return (g.level3 - h.level3).lpNorm<Eigen::Infinity>();
    }
}

// Allocation-free sweep over a pair family; all levels in one pass.
std::vector<double> holder_sweep(const RoughPathGrid& x, const RoughPathGrid* y, double alpha,
                                 const std::vector<std::pair<int, int>>& pairs) {
    const int k = x.degree();
    std::vector<double> sup(k + 1, 0.0);
    GroupTensorD gx(x.dim(), k), gy(x.dim(), k);
    const double dt = x.horizon() / x.intervals();
    for (auto [i, j] : pairs) {
        x.reconstruct_into(i, j, gx);
        if (y) y->reconstruct_into(i, j, gy);
        double base = (j - i) * dt;
        for (int lev = 1; lev <= k; ++lev) {
            double v = y ? level_entry_abs_diff(gx, gy, lev) : level_entry_abs(gx, lev);
            if (v == 0.0) continue;
            sup[lev] = std::max(sup[lev], v / std::pow(base, lev * alpha));
        }
    }
    return sup;
}

std::vector<double> besov_sweep(const RoughPathGrid& x, const RoughPathGrid* y, double alpha,
                                double m) {
    const int k = x.degree();
    const int n = x.intervals();
    std::vector<std::vector<double>> weights(k + 1);
    std::vector<double> mi(k + 1);
    for (int lev = 1; lev <= k; ++lev) {
        mi[lev] = 12.0 * m / lev;
        weights[lev] = besov_cell_weights(n, lev * alpha, mi[lev], x.horizon());
    }
    std::vector<double> acc(k + 1, 0.0);
    GroupTensorD gx(x.dim(), k), gy(x.dim(), k);
    for (int g = 1; g < n; ++g) {
        std::vector<double> row(k + 1, 0.0);
        for (int i = 0; i + g < n; ++i) {
            x.reconstruct_into(i, i + g, gx);
            if (y) y->reconstruct_into(i, i + g, gy);
            for (int lev = 1; lev <= k; ++lev) {
                double v = y ? level_entry_abs_diff(gx, gy, lev) : level_entry_abs(gx, lev);
                if (v != 0.0) row[lev] += std::pow(v, mi[lev]);
            }
        }
        for (int lev = 1; lev <= k; ++lev) acc[lev] += weights[lev][g] * row[lev];
    }
    std::vector<double> out(k + 1, 0.0);
    for (int lev = 1; lev <= k; ++lev) out[lev] = std::pow(acc[lev], 1.0 / mi[lev]);
    return out;
}

std::vector<double> level_sweep(const RoughPathGrid& x, const RoughPathGrid* y,
                                const NormMode& mode,
                                const std::vector<std::pair<int, int>>& pairs) {
    if (mode.kind == NormMode::Kind::Holder) return holder_sweep(x, y, mode.alpha, pairs);
    return besov_sweep(x, y, mode.alpha, mode.m);
}

}  // namespace

std::vector<double> level_norms(const RoughPathGrid& x, const NormMode& mode,
                                const std::vector<std::pair<int, int>>& pairs) {
    return level_sweep(x, nullptr, mode, pairs);
}

std::vector<double> level_distances(const RoughPathGrid& x, const RoughPathGrid& y,
                                    const NormMode& mode,
                                    const std::vector<std::pair<int, int>>& pairs) {
    return level_sweep(x, &y, mode, pairs);
}

double level_norm(const RoughPathGrid& x, int level_i, const NormMode& mode,
                  const std::vector<std::pair<int, int>>& pairs) {
    return level_sweep(x, nullptr, mode, pairs)[level_i];
}

double level_distance(const RoughPathGrid& x, const RoughPathGrid& y, int level_i,
                      const NormMode& mode, const std::vector<std::pair<int, int>>& pairs) {
    return level_sweep(x, &y, mode, pairs)[level_i];
}

double rough_distance(const RoughPathGrid& x, const RoughPathGrid& y, const NormMode& mode) {
    if (x.dim() != y.dim() || x.degree() != y.degree() || x.horizon() != y.horizon())
        throw std::invalid_argument("rough_distance: incompatible rough paths");
    const RoughPathGrid* a = &x;
    const RoughPathGrid* b = &y;
    RoughPathGrid restricted;
    if (x.level() != y.level()) {
        if (x.level() > y.level()) {
            restricted = x.restrict_to_coarser(y.level());
            a = &restricted;
        } else {
            restricted = y.restrict_to_coarser(x.level());
            b = &restricted;
        }
    }
    auto pairs = PairSet::automatic(a->intervals());
    std::vector<double> per_level = level_distances(*a, *b, mode, pairs);
    double d = 0.0;
    for (int i = 1; i <= a->degree(); ++i) d += per_level[i];
    return d;
}

double homogeneous_norm(const RoughPathGrid& x, const NormMode& mode) {
    auto pairs = PairSet::automatic(x.intervals());
    std::vector<double> per_level = level_norms(x, mode, pairs);
    double h = 0.0;
    for (int i = 1; i <= x.degree(); ++i) h += std::pow(per_level[i], 1.0 / i);
    return h;
}

}  // namespace fdb
