#include "fdb/bridge.hpp"

#include "fdb/errors.hpp"
#include "fdb/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fdb {

namespace {
constexpr double kLog2Pi = 1.8378770664093453;
}

DensityEstimate density_estimate(const std::vector<Eigen::VectorXd>& terminals,
                                 const Eigen::VectorXd& b, double sigma) {
    if (terminals.empty()) throw std::invalid_argument("density_estimate: empty input");
    if (sigma <= 0.0) throw std::invalid_argument("density_estimate: sigma must be positive");
    const int e = (int)b.size();
    const double log_norm = -0.5 * e * (kLog2Pi + 2.0 * std::log(sigma));
    std::vector<double> k(terminals.size());
    for (size_t i = 0; i < terminals.size(); ++i) {
        double q = (terminals[i] - b).squaredNorm() / (2.0 * sigma * sigma);
        k[i] = std::exp(log_norm - q);
    }
    DensityEstimate est;
    est.point = b;
    est.sigma = sigma;
    est.n_paths = (int)terminals.size();
    est.value = mean(k);
    est.standard_error = standard_error(k);
    return est;
}

double WeightedEnsemble::variance_of(const Eigen::VectorXd& values) const {
    return weighted_variance(weights, values);
}

namespace {

double bootstrap_se(const Eigen::VectorXd& w, const Eigen::VectorXd& x, int replicates,
                    std::uint64_t seed, bool variance_stat) {
    const int n = (int)w.size();
    std::mt19937_64 engine(derive_seed(seed, 0xb007));
    std::uniform_int_distribution<int> pick(0, n - 1);
    std::vector<double> stats(replicates);
    Eigen::VectorXd wr(n), xr(n);
    for (int r = 0; r < replicates; ++r) {
        for (int i = 0; i < n; ++i) {
            int j = pick(engine);
            wr[i] = w[j];
            xr[i] = x[j];
        }
        double s = wr.sum();
        if (s <= 0.0) { stats[r] = 0.0; continue; }
        Eigen::VectorXd wn = wr / s;
        stats[r] = variance_stat ? weighted_variance(wn, xr) : weighted_mean(wn, xr);
    }
    return std::sqrt(variance(stats));
}

}  // namespace

double WeightedEnsemble::bootstrap_se_mean(const Eigen::VectorXd& values, int replicates,
                                           std::uint64_t seed) const {
    return bootstrap_se(weights, values, replicates, seed, false);
}

double WeightedEnsemble::bootstrap_se_variance(const Eigen::VectorXd& values, int replicates,
                                               std::uint64_t seed) const {
    return bootstrap_se(weights, values, replicates, seed, true);
}

WeightedEnsemble kernel_conditioned_ensemble(const std::vector<Eigen::VectorXd>& terminals,
                                             const Eigen::VectorXd& b, double sigma) {
    if (terminals.empty()) throw std::invalid_argument("kernel_conditioned_ensemble: empty input");
    if (sigma <= 0.0) throw std::invalid_argument("kernel_conditioned_ensemble: sigma must be positive");
    const int n = (int)terminals.size();
    Eigen::VectorXd log_k(n);
    for (int i = 0; i < n; ++i)
        log_k[i] = -(terminals[i] - b).squaredNorm() / (2.0 * sigma * sigma);
    double m = log_k.maxCoeff();
    if (m < -700.0)
        throw NumericalError(
            "kernel_conditioned_ensemble: all kernel weights underflow; increase sigma "
            "or use importance sampling around the target");
    WeightedEnsemble we;
    we.sigma = sigma;
    we.weights = (log_k.array() - m).exp();
    we.weights /= we.weights.sum();
    we.ess = 1.0 / we.weights.squaredNorm();
    return we;
}

BandwidthSweep bandwidth_sweep(const std::vector<Eigen::VectorXd>& terminals,
                               const Eigen::VectorXd& b, double sigma,
                               const std::vector<Eigen::VectorXd>& functionals) {
    BandwidthSweep sweep;
    sweep.at_sigma = kernel_conditioned_ensemble(terminals, b, sigma);
    sweep.at_half = kernel_conditioned_ensemble(terminals, b, sigma / 2.0);
    for (const auto& f : functionals)
        sweep.drift.push_back(sweep.at_half.mean_of(f) - sweep.at_sigma.mean_of(f));
    return sweep;
}

GaussTransition1D GaussTransition1D::brownian(double diffusion_rate) {
    GaussTransition1D t;
    t.kind = Kind::BrownianMotion;
    t.diffusion = diffusion_rate;
    return t;
}

GaussTransition1D GaussTransition1D::ornstein_uhlenbeck(double theta, double noise) {
    GaussTransition1D t;
    t.kind = Kind::OrnsteinUhlenbeck;
    t.theta = theta;
    t.diffusion = noise;
    return t;
}

double GaussTransition1D::mean_factor(double dt) const {
    return kind == Kind::BrownianMotion ? 1.0 : std::exp(-theta * dt);
}

double GaussTransition1D::variance(double dt) const {
    if (kind == Kind::BrownianMotion) return diffusion * dt;
    if (theta == 0.0) return diffusion * diffusion * dt;
    // stable for theta -> 0 via expm1
    return diffusion * diffusion * (-std::expm1(-2.0 * theta * dt)) / (2.0 * theta);
}

double GaussTransition1D::log_density(double dt, double x0, double x1) const {
    double v = variance(dt);
    double r = x1 - mean_factor(dt) * x0;
    return -0.5 * (kLog2Pi + std::log(v)) - r * r / (2.0 * v);
}

GridPath MarkovModel::sample_path(const Eigen::VectorXd& a, double horizon, int level,
                                  GaussianStream& stream) const {
    GridPath p(state_dim, horizon, level);
    p.values.row(0) = a.transpose();
    const double dt = p.dt();
    const double m = transition.mean_factor(dt);
    const double sd = std::sqrt(transition.variance(dt));
    for (int i = 0; i < p.intervals(); ++i)
        for (int c = 0; c < state_dim; ++c)
            p.values(i + 1, c) = m * p.values(i, c) + sd * stream();
    return p;
}

BridgeFdd::BridgeFdd(MarkovModel model, Eigen::VectorXd times, Eigen::VectorXd a,
                     Eigen::VectorXd b)
    : model_(model), times_(std::move(times)), a_(std::move(a)), b_(std::move(b)) {
    const int n = (int)times_.size();
    if (n == 0) throw std::invalid_argument("BridgeFdd: empty time set");
    for (int i = 0; i < n; ++i) {
        if (times_[i] <= 0.0 || (i > 0 && times_[i] <= times_[i - 1]))
            throw std::invalid_argument("BridgeFdd: times must be strictly increasing and positive");
    }
    if ((int)a_.size() != model_.state_dim || (int)b_.size() != model_.state_dim)
        throw std::invalid_argument("BridgeFdd: endpoint dimension mismatch");
    const double T = times_[n - 1];
    double vT = model_.transition.variance(T);
    if (vT <= 0.0)
        throw NumericalError("BridgeFdd: undefined bridge, p(T,a,b) = 0");
    log_p_T_ = 0.0;
    for (int c = 0; c < model_.state_dim; ++c)
        log_p_T_ += model_.transition.log_density(T, a_[c], b_[c]);
}

double BridgeFdd::log_fdd(const std::vector<Eigen::VectorXd>& interior) const {
    const int n = (int)times_.size();
    if ((int)interior.size() != n - 1)
        throw std::invalid_argument("BridgeFdd: expected one point per interior time");
    double acc = -log_p_T_;
    Eigen::VectorXd prev = a_;
    double t_prev = 0.0;
    for (int i = 0; i < n; ++i) {
        const Eigen::VectorXd& x = (i == n - 1) ? b_ : interior[i];
        double dt = times_[i] - t_prev;
        for (int c = 0; c < model_.state_dim; ++c)
            acc += model_.transition.log_density(dt, prev[c], x[c]);
        prev = x;
        t_prev = times_[i];
    }
    return acc;
}

void BridgeFdd::marginal(int i, Eigen::VectorXd& mean, double& var) const {
    const int n = (int)times_.size();
    if (i < 0 || i >= n - 1) throw std::invalid_argument("BridgeFdd: interior index out of range");
    const double t = times_[i], T = times_[n - 1];
    const double m1 = model_.transition.mean_factor(t), v1 = model_.transition.variance(t);
    const double m2 = model_.transition.mean_factor(T - t), v2 = model_.transition.variance(T - t);
    const double lambda = 1.0 / v1 + m2 * m2 / v2;
    var = 1.0 / lambda;
    mean.resize(model_.state_dim);
    for (int c = 0; c < model_.state_dim; ++c)
        mean[c] = (m1 * a_[c] / v1 + m2 * b_[c] / v2) / lambda;
}

std::vector<Eigen::VectorXd> BridgeFdd::sample_interior(GaussianStream& stream) const {
    const int n = (int)times_.size();
    std::vector<Eigen::VectorXd> out;
    Eigen::VectorXd prev = a_;
    double t_prev = 0.0;
    const double T = times_[n - 1];
    for (int i = 0; i < n - 1; ++i) {
        const double dt = times_[i] - t_prev;
        const double m1 = model_.transition.mean_factor(dt), v1 = model_.transition.variance(dt);
        const double m2 = model_.transition.mean_factor(T - times_[i]);
        const double v2 = model_.transition.variance(T - times_[i]);
        const double lambda = 1.0 / v1 + m2 * m2 / v2;
        const double sd = std::sqrt(1.0 / lambda);
        Eigen::VectorXd x(model_.state_dim);
        for (int c = 0; c < model_.state_dim; ++c) {
            double mu = (m1 * prev[c] / v1 + m2 * b_[c] / v2) / lambda;
            x[c] = mu + sd * stream();
        }
        out.push_back(x);
        prev = x;
        t_prev = times_[i];
    }
    return out;
}

namespace {

double weighted_ks(const Eigen::VectorXd& w, const Eigen::VectorXd& x, double mean, double sd) {
    std::vector<int> order(x.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&x](int a, int b) { return x[a] < x[b]; });
    double cdf = 0.0, ks = 0.0;
    for (int idx : order) {
        double exact = 0.5 * std::erfc(-(x[idx] - mean) / (sd * std::sqrt(2.0)));
        ks = std::max(ks, std::abs(cdf - exact));
        cdf += w[idx];
        ks = std::max(ks, std::abs(cdf - exact));
    }
    return ks;
}

}  // namespace

BridgeConsistencyReport bridge_consistency_test(const MarkovModel& model,
                                                const std::vector<double>& times,
                                                const Eigen::VectorXd& a,
                                                const Eigen::VectorXd& b,
                                                const BridgeMcParams& mc) {
    if (times.empty()) throw std::invalid_argument("bridge_consistency_test: empty time list");
    const double T = times.back();
    GridPath grid_probe(model.state_dim, T, mc.level);
    // requested times must sit on the simulation grid
    std::vector<int> idx;
    for (double t : times) {
        double pos = t / grid_probe.dt();
        int i = (int)std::llround(pos);
        if (std::abs(pos - i) > 1e-9)
            throw std::invalid_argument("bridge_consistency_test: time off the dyadic grid");
        idx.push_back(i);
    }

    std::vector<Eigen::VectorXd> terminals(mc.n_paths);
    Eigen::MatrixXd at_times(mc.n_paths, times.size());  // first coordinate
    for (int p = 0; p < mc.n_paths; ++p) {
        GaussianStream stream(derive_seed(mc.seed, (std::uint64_t)p, 0xce));
        GridPath path = model.sample_path(a, T, mc.level, stream);
        terminals[p] = path.values.row(path.intervals()).transpose();
        for (size_t k = 0; k < idx.size(); ++k) at_times(p, k) = path.values(idx[k], 0);
    }
    WeightedEnsemble we = kernel_conditioned_ensemble(terminals, b, mc.sigma);

    Eigen::VectorXd fdd_times((int)times.size());
    for (size_t k = 0; k < times.size(); ++k) fdd_times[(int)k] = times[k];
    BridgeFdd fdd(model, fdd_times, a, b);

    BridgeConsistencyReport rep;
    rep.sigma = mc.sigma;
    rep.ess = we.ess;
    rep.n_paths = mc.n_paths;
    for (size_t k = 0; k < times.size(); ++k) {
        BridgeMarginalRow row;
        row.time = times[k];
        Eigen::VectorXd vals = at_times.col(k);
        row.mean_weighted = we.mean_of(vals);
        row.var_weighted = we.variance_of(vals);
        row.mean_se = we.bootstrap_se_mean(vals, mc.bootstrap, derive_seed(mc.seed, k, 1));
        row.var_se = we.bootstrap_se_variance(vals, mc.bootstrap, derive_seed(mc.seed, k, 2));
        if (k + 1 < times.size()) {
            Eigen::VectorXd mean;
            double var;
            fdd.marginal((int)k, mean, var);
            row.mean_exact = mean[0];
            row.var_exact = var;
        } else {
            row.mean_exact = b[0];  // pinned terminal
            row.var_exact = 0.0;
        }
        row.ks_stat = weighted_ks(we.weights, vals, row.mean_exact,
                                  std::sqrt(std::max(row.var_exact, 1e-300)));
        rep.rows.push_back(row);
    }
    return rep;
}

GridPath straight_line_bridge(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                              double horizon, int level) {
    GridPath p((int)a.size(), horizon, level);
    for (int i = 0; i <= p.intervals(); ++i) {
        double theta = (double)i / p.intervals();
        p.values.row(i) = ((1.0 - theta) * a + theta * b).transpose();
    }
    return p;
}

}  // namespace fdb
