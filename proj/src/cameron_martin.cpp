#include "fdb/cameron_martin.hpp"

#include "fdb/errors.hpp"
#include "fdb/path_norms.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fdb {

CameronMartinElement::CameronMartinElement(CovarianceModel model, Eigen::VectorXd times,
                                           Eigen::MatrixXd values)
    : model_(std::move(model)), times_(std::move(times)), values_(std::move(values)) {
    const int n = (int)times_.size();
    if (n == 0) throw std::invalid_argument("CameronMartinElement: empty time set");
    if (values_.rows() != n || values_.cols() != model_.dim())
        throw std::invalid_argument("CameronMartinElement: value shape mismatch");
    for (int a = 0; a < n; ++a) {
        if (times_[a] <= 0.0 || times_[a] > model_.horizon)
            throw std::invalid_argument("CameronMartinElement: times must lie in (0, T]");
        if (a > 0 && times_[a] <= times_[a - 1])
            throw std::invalid_argument("CameronMartinElement: times must be strictly increasing");
    }
    for (int j = 0; j < model_.dim(); ++j) {
        Eigen::MatrixXd sigma = covariance_matrix(model_, j, times_);
        Eigen::LLT<Eigen::MatrixXd> llt(sigma);
        bool failed = llt.info() != Eigen::Success;
        double cond_sq = 0.0;
        if (!failed) {
            // condition estimate from the Cholesky diagonal; no silent jitter
            Eigen::VectorXd diag = Eigen::MatrixXd(llt.matrixL()).diagonal();
            double dmin = diag.minCoeff(), dmax = diag.maxCoeff();
            cond_sq = dmin > 0.0 ? (dmax / dmin) * (dmax / dmin)
                                 : std::numeric_limits<double>::infinity();
            failed = cond_sq > 1e14;
        }
        if (failed)
            throw NumericalError(
                "CameronMartinElement: ill-conditioned Gram matrix (component "
                + std::to_string(j) + ", condition estimate "
                + std::to_string(cond_sq) + ")");
        llt_.push_back(std::move(llt));
    }
}

Eigen::VectorXd CameronMartinElement::gram_solve(int j, const Eigen::VectorXd& rhs) const {
    return llt_[j].solve(rhs);
}

double cm_norm_sq(const CameronMartinElement& elem) {
    double acc = 0.0;
    for (int j = 0; j < elem.dim(); ++j) {
        Eigen::VectorXd v = elem.values().col(j);
        acc += v.dot(elem.gram_solve(j, v));
    }
    return acc;
}

GridPath cm_interpolant_on_grid(const CameronMartinElement& elem, int level) {
    GridPath h(elem.dim(), elem.model().horizon, level);
    const int n = (int)elem.times().size();
    for (int j = 0; j < elem.dim(); ++j) {
        Eigen::VectorXd coeff = elem.gram_solve(j, elem.values().col(j));
        for (int i = 1; i <= h.intervals(); ++i) {
            double t = h.time(i);
            double acc = 0.0;
            for (int a = 0; a < n; ++a)
                acc += covariance(elem.model(), j, t, elem.times()[a]) * coeff[a];
            h.values(i, j) = acc;
        }
    }
    return h;
}

CmEmbeddingReport cm_embedding_check(const CameronMartinElement& elem, double q, int level) {
    for (int j = 0; j < elem.dim(); ++j) {
        double lo = 1.0 / (elem.model().hurst[j] + 0.5);
        if (q <= lo || q >= 2.0)
            throw std::invalid_argument("cm_embedding_check: q outside ((H+1/2)^{-1}, 2)");
    }
    CmEmbeddingReport rep;
    rep.q = q;
    rep.level = level;
    rep.norm = std::sqrt(cm_norm_sq(elem));
    GridPath h = cm_interpolant_on_grid(elem, level);
    if (rep.norm == 0.0) return rep;
    const double expo = 1.0 / q - 0.5;
    // ladder pairs: the per-pair p-variation DP is quadratic in the span
    for (auto [i, j] : PairSet::ladder(h.intervals())) {
        double num = pvar_norm(h, q, i, j);
        double den = rep.norm * std::pow(h.time(j) - h.time(i), expo);
        rep.max_ratio = std::max(rep.max_ratio, num / den);
    }
    return rep;
}

}  // namespace fdb
