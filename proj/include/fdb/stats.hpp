// Small statistics helpers shared by the diagnostics modules.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace fdb {

struct LinearFit {
    double intercept = 0.0;
    double slope = 0.0;
    double r2 = 1.0;
};

inline LinearFit linear_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
    const size_t n = xs.size();
    if (n != ys.size() || n < 2) throw std::invalid_argument("linear_fit: need >= 2 points");
    double mx = 0, my = 0;
    for (size_t i = 0; i < n; ++i) { mx += xs[i]; my += ys[i]; }
    mx /= n; my /= n;
    double sxx = 0, sxy = 0, syy = 0;
    for (size_t i = 0; i < n; ++i) {
        sxx += (xs[i] - mx) * (xs[i] - mx);
        sxy += (xs[i] - mx) * (ys[i] - my);
        syy += (ys[i] - my) * (ys[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

inline double mean(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m += x;
    return v.empty() ? 0.0 : m / v.size();
}

inline double variance(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double m = mean(v), acc = 0;
    for (double x : v) acc += (x - m) * (x - m);
    return acc / (v.size() - 1);
}

inline double standard_error(const std::vector<double>& v) {
    return v.empty() ? 0.0 : std::sqrt(variance(v) / v.size());
}

inline double weighted_mean(const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
    return w.dot(x);  // weights normalized to sum 1
}

inline double weighted_variance(const Eigen::VectorXd& w, const Eigen::VectorXd& x) {
    double m = weighted_mean(w, x);
    return w.dot((x.array() - m).square().matrix());
}

}  // namespace fdb
