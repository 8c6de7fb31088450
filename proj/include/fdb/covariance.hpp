// Mixed fractional Brownian motion covariance: pointwise values, rectangular
// increments, Gram matrices and the dyadic 2D rho-variation diagnostic.
#pragma once

#include <Eigen/Dense>

namespace fdb {

// Independent components; component j is fBm with Hurst parameter hurst[j].
struct CovarianceModel {
    Eigen::VectorXd hurst;
    double horizon = 1.0;

    CovarianceModel() = default;
    CovarianceModel(Eigen::VectorXd h, double T);
    int dim() const { return (int)hurst.size(); }
};

// R_j(s,t) = (s^{2H} + t^{2H} - |t-s|^{2H}) / 2.
double covariance(const CovarianceModel& model, int j, double s, double t);

// E[(w_t - w_s)(w_v - w_u)].
double rect_increment(const CovarianceModel& model, int j, double s, double t,
                      double u, double v);

// Gram matrix [R_j(t_a, t_b)] over the given times.
Eigen::MatrixXd covariance_matrix(const CovarianceModel& model, int j,
                                  const Eigen::VectorXd& times);

// Max over uniform dyadic partitions of [s,t] up to `depth` of the common-
// refinement (pi = pi') double sum in the 2D variation. Exact family for
// rho = 1; a lower bound of the sup for rho > 1.
double twoD_rho_variation(const CovarianceModel& model, int j, double s, double t,
                          double rho, int depth);

}  // namespace fdb
