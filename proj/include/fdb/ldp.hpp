// Freidlin-Wentzell machinery: constrained Cameron-Martin-norm minimization,
// Schilder rates, bridge-path rates, Varadhan small-noise sweeps and the
// exponential-tightness tail probe.
#pragma once

#include "fdb/cameron_martin.hpp"
#include "fdb/covariance.hpp"
#include "fdb/grid_path.hpp"
#include "fdb/solvers.hpp"
#include "fdb/vector_fields.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace fdb {

struct OptimizerSettings {
    double penalty_start = 1e2;
    double penalty_growth = 10.0;
    int penalty_stages = 5;
    int max_inner_iterations = 200;
    double gradient_tol = 1e-9;
    double residual_tol = 1e-5;
};

struct RateProblem {
    std::shared_ptr<VectorFieldSystem> fields;
    CovarianceModel cov;           // driver components and their Hurst indices
    Eigen::VectorXd a, b;
    double beta0 = 0.0;
    int control_level = 5;         // control grid 2^level intervals
    int solve_level = 9;           // skeleton solve grid
    OptimizerSettings optimizer;
};

struct PenaltyStageTrace {
    double penalty = 0.0;
    int iterations = 0;
    double objective = 0.0;
    double residual = 0.0;
};

struct RateResult {
    Eigen::MatrixXd control_values;  // (2^control_level) x d values at t_1..t_M
    GridPath control_path;           // interpolated onto the solve grid
    double value = 0.0;              // 1/2 ||h||^2 (Gram proxy)
    double residual = 0.0;           // |Psi(h)_T - b|
    std::vector<PenaltyStageTrace> trace;
    bool elliptic_warning = false;
};

// Minimizes (1/2) v^T Sigma^{-1} v over grid controls subject to the skeleton
// terminal constraint, by quadratic penalty with a BFGS inner loop; warm
// start from control_from_path along the straight line a -> b.
RateResult rate_endpoint(const RateProblem& problem);

// (1/2) cm_norm_sq(h).
double schilder_rate(const CameronMartinElement& elem);

struct BridgeRateResult {
    double value = 0.0;        // J(xi)
    double raw_energy = 0.0;   // 1/2 ||h||^2 before subtracting the minimum
    bool upper_bound = false;  // true when driver_dim > state_dim
};

// J(xi) = 1/2 ||control_from_path(xi)||^2 - rate_endpoint minimum.
BridgeRateResult bridge_rate_J(const GridPath& xi, const RateProblem& problem,
                               const RateResult& endpoint_rate);

using BetaFn = std::function<double(double)>;  // epsilon -> beta_epsilon
BetaFn beta_constant(double value = 1.0);
BetaFn beta_power_h(double hurst);             // epsilon^{1/H}

struct VaradhanPoint {
    double epsilon = 0.0;
    int n_paths = 0;
    double p_hat = 0.0;
    double standard_error = 0.0;
    double rel_se = 0.0;
    double eps2_log_p = 0.0;
    double gap_to_rate = 0.0;   // |eps^2 log p + rate|
    bool used_importance = false;
};

struct VaradhanReport {
    std::vector<VaradhanPoint> points;
    double rate_value = 0.0;
    double extrapolated_limit = 0.0;  // intercept of eps^2 log p vs eps^2
};

struct VaradhanParams {
    std::vector<double> epsilons;       // decreasing
    std::vector<int> n_paths;           // one entry, or one per epsilon
    double sigma_coeff = 0.05;          // bandwidth sigma = coeff * epsilon
    int sample_level = 6;
    int degree = 2;
    std::uint64_t seed = 1;
    bool importance_sampling = true;
    bool richardson = true;             // extrapolate the kernel bandwidth
    BetaFn beta;                        // defaults to 1
};

// For each epsilon: sample the driver, solve the scaled equation (rough
// route for H <= 1/2, Young route for H > 1/2), estimate p(T,a,b) by kernel
// density (with the Cameron-Martin shift w -> w + h*/eps when importance
// sampling), and compare eps^2 log p against -rate.
VaradhanReport varadhan_sweep(const RateProblem& problem, const VaradhanParams& params);

struct TailProbeRow {
    double radius = 0.0;
    double probability = 0.0;
    int exceedances = 0;
    bool in_fit = true;
};

struct TailProbeReport {
    std::vector<TailProbeRow> rows;
    double slope = 0.0;        // of log P vs R^2 (should be negative)
    double intercept = 0.0;
    bool fit_valid = false;
};

struct TailProbeParams {
    double alpha = 0.45;
    int degree = 2;
    int level = 8;
    int n_paths = 2000;
    std::uint64_t seed = 1;
    int min_exceedances = 10;
};

// Empirical P(|||W||| >= R) for the homogeneous alpha-Holder norm of lifts.
TailProbeReport tail_probe(const CovarianceModel& cov, const std::vector<double>& radii,
                           const TailProbeParams& params);

}  // namespace fdb
