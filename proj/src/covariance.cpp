#include "fdb/covariance.hpp"

#include <cmath>
#include <stdexcept>

namespace fdb {

CovarianceModel::CovarianceModel(Eigen::VectorXd h, double T) : hurst(std::move(h)), horizon(T) {
    if (hurst.size() == 0) throw std::invalid_argument("CovarianceModel: empty Hurst vector");
    if (T <= 0.0) throw std::invalid_argument("CovarianceModel: horizon must be positive");
    for (int j = 0; j < hurst.size(); ++j)
        if (hurst[j] <= 0.0 || hurst[j] >= 1.0)
            throw std::invalid_argument("CovarianceModel: Hurst parameters must lie in (0,1)");
}

double covariance(const CovarianceModel& model, int j, double s, double t) {
    if (j < 0 || j >= model.dim()) throw std::invalid_argument("covariance: component out of range");
    const double tol = 1e-12 * model.horizon;
    if (s < -tol || t < -tol || s > model.horizon + tol || t > model.horizon + tol)
        throw std::invalid_argument("covariance: times outside [0, T]");
    const double twoH = 2.0 * model.hurst[j];
    return 0.5 * (std::pow(s, twoH) + std::pow(t, twoH) - std::pow(std::abs(t - s), twoH));
}

double rect_increment(const CovarianceModel& model, int j, double s, double t,
                      double u, double v) {
    if (s > t || u > v) throw std::invalid_argument("rect_increment: interval order violated");
    return covariance(model, j, t, v) - covariance(model, j, s, v)
         - covariance(model, j, t, u) + covariance(model, j, s, u);
}

Eigen::MatrixXd covariance_matrix(const CovarianceModel& model, int j,
                                  const Eigen::VectorXd& times) {
    const int n = (int)times.size();
    Eigen::MatrixXd sigma(n, n);
    for (int a = 0; a < n; ++a)
        for (int b = a; b < n; ++b)
            sigma(a, b) = sigma(b, a) = covariance(model, j, times[a], times[b]);
    return sigma;
}

double twoD_rho_variation(const CovarianceModel& model, int j, double s, double t,
                          double rho, int depth) {
    if (rho < 1.0) throw std::invalid_argument("twoD_rho_variation: rho >= 1 required");
    if (s >= t) throw std::invalid_argument("twoD_rho_variation: empty square");
    double best = 0.0;
    for (int dep = 0; dep <= depth; ++dep) {
        const int n = 1 << dep;
        const double h = (t - s) / n;
        // cache increment covariances against grid cells
        Eigen::MatrixXd rect(n, n);
        for (int a = 0; a < n; ++a)
            for (int b = a; b < n; ++b)
                rect(a, b) = rect(b, a) = rect_increment(model, j, s + a * h, s + (a + 1) * h,
                                                         s + b * h, s + (b + 1) * h);
        double sum = 0.0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) sum += std::pow(std::abs(rect(a, b)), rho);
        best = std::max(best, std::pow(sum, 1.0 / rho));
    }
    return best;
}

}  // namespace fdb
