// Mollified conditioning of solution ensembles on the terminal value, kernel
// density estimation, and exact H = 1/2 bridge laws via Chapman-Kolmogorov
// for the built-in Gaussian transition models.
#pragma once

#include "fdb/grid_path.hpp"
#include "fdb/sampling.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace fdb {

struct DensityEstimate {
    Eigen::VectorXd point;
    double sigma = 0.0;
    double value = 0.0;
    double standard_error = 0.0;
    int n_paths = 0;
};

// (1/n) sum K_sigma(y_i - b) with an isotropic Gaussian product kernel.
DensityEstimate density_estimate(const std::vector<Eigen::VectorXd>& terminals,
                                 const Eigen::VectorXd& b, double sigma);

struct WeightedEnsemble {
    Eigen::VectorXd weights;  // normalized to sum 1
    double sigma = 0.0;
    double ess = 0.0;         // 1 / sum w_i^2

    double mean_of(const Eigen::VectorXd& values) const { return weights.dot(values); }
    double variance_of(const Eigen::VectorXd& values) const;
    // seeded multinomial bootstrap of the weighted mean
    double bootstrap_se_mean(const Eigen::VectorXd& values, int replicates,
                             std::uint64_t seed) const;
    double bootstrap_se_variance(const Eigen::VectorXd& values, int replicates,
                                 std::uint64_t seed) const;
};

// Weights w_i proportional to K_sigma(y_T^(i) - b). Throws when every kernel
// value underflows to zero (b too deep in the tail for this bandwidth).
WeightedEnsemble kernel_conditioned_ensemble(const std::vector<Eigen::VectorXd>& terminals,
                                             const Eigen::VectorXd& b, double sigma);

// Drift of requested weighted functionals when the bandwidth is halved.
struct BandwidthSweep {
    WeightedEnsemble at_sigma;
    WeightedEnsemble at_half;
    std::vector<double> drift;  // mean shift per functional
};
BandwidthSweep bandwidth_sweep(const std::vector<Eigen::VectorXd>& terminals,
                               const Eigen::VectorXd& b, double sigma,
                               const std::vector<Eigen::VectorXd>& functionals);

// Scalar Gaussian transition model per coordinate: X_{t+dt} | X_t = x is
// N(mean_factor(dt) x, variance(dt)). Covers Brownian motion with scalar
// diffusion and the Ornstein-Uhlenbeck built-in.
struct GaussTransition1D {
    enum class Kind { BrownianMotion, OrnsteinUhlenbeck };
    Kind kind = Kind::BrownianMotion;
    double diffusion = 1.0;  // BM: variance rate; OU: noise coefficient
    double theta = 0.0;      // OU mean reversion

    static GaussTransition1D brownian(double diffusion_rate = 1.0);
    static GaussTransition1D ornstein_uhlenbeck(double theta, double noise = 1.0);

    double mean_factor(double dt) const;
    double variance(double dt) const;
    double log_density(double dt, double x0, double x1) const;
};

// Product model: independent coordinates sharing one scalar transition.
struct MarkovModel {
    GaussTransition1D transition;
    int state_dim = 1;

    // exact unconditional simulation on the time grid (t_0 = 0 at value a)
    GridPath sample_path(const Eigen::VectorXd& a, double horizon, int level,
                         GaussianStream& stream) const;
};

class BridgeFdd {
public:
    // times strictly increasing with last == T; throws an undefined-bridge
    // error when p(T, a, b) vanishes.
    BridgeFdd(MarkovModel model, Eigen::VectorXd times, Eigen::VectorXd a, Eigen::VectorXd b);

    // log of p(T,a,b)^{-1} prod p(t_i - t_{i-1}, x_{i-1}, x_i), x_N = b.
    double log_fdd(const std::vector<Eigen::VectorXd>& interior) const;

    // exact interior marginal at times[i] (Gaussian per coordinate)
    void marginal(int i, Eigen::VectorXd& mean, double& var) const;

    // exact sequential sampling of the interior points
    std::vector<Eigen::VectorXd> sample_interior(GaussianStream& stream) const;

    double log_terminal_density() const { return log_p_T_; }
    const Eigen::VectorXd& times() const { return times_; }

private:
    MarkovModel model_;
    Eigen::VectorXd times_, a_, b_;
    double log_p_T_ = 0.0;
};

struct BridgeMarginalRow {
    double time = 0.0;
    double mean_weighted = 0.0, mean_exact = 0.0, mean_se = 0.0;
    double var_weighted = 0.0, var_exact = 0.0, var_se = 0.0;
    double ks_stat = 0.0;  // weighted empirical CDF vs exact Gaussian CDF
};

struct BridgeConsistencyReport {
    std::vector<BridgeMarginalRow> rows;  // first coordinate marginals
    double ess = 0.0;
    double sigma = 0.0;
    int n_paths = 0;
};

struct BridgeMcParams {
    int n_paths = 100000;
    double sigma = 0.05;
    int level = 7;
    std::uint64_t seed = 1;
    int bootstrap = 100;
};

// Mollified conditioning of exact model simulations against the exact
// Chapman-Kolmogorov marginals at the given times.
BridgeConsistencyReport bridge_consistency_test(const MarkovModel& model,
                                                const std::vector<double>& times,
                                                const Eigen::VectorXd& a,
                                                const Eigen::VectorXd& b,
                                                const BridgeMcParams& mc);

// The degenerate-bridge convention: straight line from a to b.
GridPath straight_line_bridge(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              double horizon, int level);

}  // namespace fdb
