// Finite-dimensional Cameron-Martin machinery: Gram-based squared norms of
// minimal-norm interpolants, representer interpolation onto dyadic grids,
// and the q-variation embedding diagnostic.
#pragma once

#include "fdb/covariance.hpp"
#include "fdb/grid_path.hpp"

#include <vector>

namespace fdb {

// Prescribed values at strictly increasing times (all > 0) per component,
// plus the covariance model supplying the Gram matrices.
class CameronMartinElement {
public:
    CameronMartinElement(CovarianceModel model, Eigen::VectorXd times,
                         Eigen::MatrixXd values);  // values: n_times x dim

    const CovarianceModel& model() const { return model_; }
    const Eigen::VectorXd& times() const { return times_; }
    const Eigen::MatrixXd& values() const { return values_; }
    int dim() const { return model_.dim(); }

    // Gram solve Sigma_j x = rhs; throws a conditioning error (with the
    // estimate embedded in the message) if the factorization fails.
    Eigen::VectorXd gram_solve(int j, const Eigen::VectorXd& rhs) const;

private:
    CovarianceModel model_;
    Eigen::VectorXd times_;
    Eigen::MatrixXd values_;
    std::vector<Eigen::LLT<Eigen::MatrixXd>> llt_;
};

// sum_j v_j^T Sigma_j^{-1} v_j: squared norm of the minimal-norm interpolant;
// a monotone-from-below proxy for the Cameron-Martin norm.
double cm_norm_sq(const CameronMartinElement& elem);

// Minimal-norm interpolant evaluated on the dyadic grid via the representer
// formula h(t) = r(t)^T Sigma^{-1} v.
GridPath cm_interpolant_on_grid(const CameronMartinElement& elem, int level);

struct CmEmbeddingReport {
    double q = 0.0;
    double norm = 0.0;              // sqrt(cm_norm_sq)
    double max_ratio = 0.0;         // empirical c1
    int level = 0;
};

// Ratio ||h||_{q-var,[s,t]} / (||h||_H (t-s)^{1/q - 1/2}) over grid
// sub-intervals of the level-`level` interpolant; max reported.
CmEmbeddingReport cm_embedding_check(const CameronMartinElement& elem, double q, int level);

}  // namespace fdb
