#include "fdb/ldp.hpp"

#include "fdb/bridge.hpp"
#include "fdb/errors.hpp"
#include "fdb/lift.hpp"
#include "fdb/path_norms.hpp"
#include "fdb/sampling.hpp"
#include "fdb/stats.hpp"

#include <Eigen/Cholesky>
#include <cmath>

namespace fdb {

namespace {

// Control parameterization: values v at the coarse dyadic times t_1..t_M,
// piecewise-linear in between, resampled onto the solve grid.
struct ControlSpace {
    const RateProblem& problem;
    Eigen::VectorXd coarse_times;  // M entries, excludes t = 0
    std::vector<Eigen::LLT<Eigen::MatrixXd>> gram;  // per driver component
    int m() const { return (int)coarse_times.size(); }
    int d() const { return problem.cov.dim(); }

    explicit ControlSpace(const RateProblem& p) : problem(p) {
        const int M = 1 << p.control_level;
        coarse_times.resize(M);
        for (int i = 0; i < M; ++i)
            coarse_times[i] = p.cov.horizon * (i + 1) / M;
        for (int j = 0; j < d(); ++j) {
            Eigen::MatrixXd sigma = covariance_matrix(p.cov, j, coarse_times);
            Eigen::LLT<Eigen::MatrixXd> llt(sigma);
            if (llt.info() != Eigen::Success)
                throw NumericalError("rate_endpoint: Gram factorization failed");
            gram.push_back(std::move(llt));
        }
    }

    double energy(const Eigen::MatrixXd& v, Eigen::MatrixXd* grad = nullptr) const {
        double acc = 0.0;
        for (int j = 0; j < d(); ++j) {
            Eigen::VectorXd g = gram[j].solve(v.col(j));
            acc += 0.5 * v.col(j).dot(g);
            if (grad) grad->col(j) = g;
        }
        return acc;
    }

    GridPath path(const Eigen::MatrixXd& v) const {
        GridPath h(d(), problem.cov.horizon, problem.solve_level);
        const int stride = 1 << (problem.solve_level - problem.control_level);
        for (int i = 0; i < m(); ++i) {
            Eigen::RowVectorXd prev =
                i == 0 ? Eigen::RowVectorXd::Zero(d()).eval() : v.row(i - 1).eval();
            for (int s = 1; s <= stride; ++s) {
                double theta = (double)s / stride;
                h.values.row(i * stride + s) = (1.0 - theta) * prev + theta * v.row(i);
            }
        }
        return h;
    }

    Eigen::VectorXd constraint(const Eigen::MatrixXd& v) const {
        SolveOptions opts;
        opts.two_grid_estimate = false;
        SolutionPath sol = solve_skeleton(*problem.fields, path(v), problem.a, problem.beta0, opts);
        return sol.states.values.row(sol.states.intervals()).transpose() - problem.b;
    }
};

struct PenaltyObjective {
    const ControlSpace& space;
    double rho;

    double value_and_gradient(const Eigen::MatrixXd& v, Eigen::MatrixXd& grad) const {
        Eigen::MatrixXd energy_grad(v.rows(), v.cols());
        double f = space.energy(v, &energy_grad);
        Eigen::VectorXd c = space.constraint(v);
        f += 0.5 * rho * c.squaredNorm();
        // forward differences of the constraint over control coordinates
        grad = energy_grad;
        const double h = 1e-6 * std::max(1.0, v.norm());
        Eigen::MatrixXd vp = v;
        for (int i = 0; i < v.rows(); ++i)
            for (int j = 0; j < v.cols(); ++j) {
                vp(i, j) += h;
                Eigen::VectorXd cp = space.constraint(vp);
                vp(i, j) = v(i, j);
                grad(i, j) += rho * c.dot((cp - c) / h);
            }
        return f;
    }
};

// Dense BFGS with Armijo backtracking on the flattened control vector.
struct BfgsResult {
    int iterations = 0;
    double value = 0.0;
};

BfgsResult bfgs_minimize(const PenaltyObjective& obj, Eigen::MatrixXd& v, int max_iter,
                         double gtol) {
    const int rows = (int)v.rows(), cols = (int)v.cols();
    const int n = rows * cols;
    auto flatten = [&](const Eigen::MatrixXd& m) {
        return Eigen::Map<const Eigen::VectorXd>(m.data(), n).eval();
    };
    auto unflatten = [&](const Eigen::VectorXd& x) {
        return Eigen::Map<const Eigen::MatrixXd>(x.data(), rows, cols).eval();
    };
    Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd grad_m(rows, cols);
    double f = obj.value_and_gradient(v, grad_m);
    Eigen::VectorXd x = flatten(v), g = flatten(grad_m);
    BfgsResult res;
    for (int it = 0; it < max_iter; ++it) {
        if (g.lpNorm<Eigen::Infinity>() < gtol * std::max(1.0, std::abs(f))) break;
        Eigen::VectorXd dir = -hinv * g;
        if (dir.dot(g) > 0) dir = -g;  // safeguard
        double step = 1.0;
        double slope = g.dot(dir);
        double f_new = f;
        Eigen::VectorXd x_new = x, g_new = g;
        Eigen::MatrixXd grad_new(rows, cols);
        bool accepted = false;
        for (int ls = 0; ls < 40; ++ls) {
            x_new = x + step * dir;
            Eigen::MatrixXd v_new = unflatten(x_new);
            f_new = obj.value_and_gradient(v_new, grad_new);
            if (f_new <= f + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        g_new = flatten(grad_new);
        Eigen::VectorXd s = x_new - x, yv = g_new - g;
        double sy = s.dot(yv);
        if (sy > 1e-12 * s.norm() * yv.norm()) {
            Eigen::VectorXd hy = hinv * yv;
            double yhy = yv.dot(hy);
            hinv += ((sy + yhy) / (sy * sy)) * (s * s.transpose())
                  - (hy * s.transpose() + s * hy.transpose()) / sy;
        }
        x = x_new;
        g = g_new;
        f = f_new;
        ++res.iterations;
    }
    v = unflatten(x);
    res.value = f;
    return res;
}

}  // namespace

RateResult rate_endpoint(const RateProblem& problem) {
    if (!problem.fields) throw std::invalid_argument("rate_endpoint: missing vector fields");
    if (problem.control_level > problem.solve_level)
        throw std::invalid_argument("rate_endpoint: control grid finer than solve grid");
    ControlSpace space(problem);

    RateResult result;
    // warm start along the straight line a -> b when ellipticity holds there
    Eigen::MatrixXd v = Eigen::MatrixXd::Zero(space.m(), space.d());
    GridPath line = straight_line_bridge(problem.a, problem.b, problem.cov.horizon,
                                         problem.solve_level);
    try {
        GridPath h0 = control_from_path(*problem.fields, line, problem.beta0);
        const int stride = 1 << (problem.solve_level - problem.control_level);
        for (int i = 0; i < space.m(); ++i)
            v.row(i) = h0.values.row((i + 1) * stride);
    } catch (const NumericalError&) {
        result.elliptic_warning = true;  // fall back to the zero control
    }

    double rho = problem.optimizer.penalty_start;
    for (int stage = 0; stage < problem.optimizer.penalty_stages; ++stage) {
        PenaltyObjective obj{space, rho};
        BfgsResult br = bfgs_minimize(obj, v, problem.optimizer.max_inner_iterations,
                                      problem.optimizer.gradient_tol);
        PenaltyStageTrace tr;
        tr.penalty = rho;
        tr.iterations = br.iterations;
        tr.objective = space.energy(v);
        tr.residual = space.constraint(v).norm();
        result.trace.push_back(tr);
        rho *= problem.optimizer.penalty_growth;
    }

    result.control_values = v;
    result.control_path = space.path(v);
    result.value = space.energy(v);
    result.residual = space.constraint(v).norm();
    if (result.residual > problem.optimizer.residual_tol) {
        std::string msg = "rate_endpoint: constraint residual stagnated at "
                        + std::to_string(result.residual) + " (stages:";
        for (const auto& t : result.trace)
            msg += " [rho=" + std::to_string(t.penalty) + " res=" + std::to_string(t.residual) + "]";
        throw NumericalError(msg + ")");
    }
    return result;
}

double schilder_rate(const CameronMartinElement& elem) {
    return 0.5 * cm_norm_sq(elem);
}

BridgeRateResult bridge_rate_J(const GridPath& xi, const RateProblem& problem,
                               const RateResult& endpoint_rate) {
    if ((xi.values.row(0).transpose() - problem.a).lpNorm<Eigen::Infinity>() > 1e-12)
        throw std::invalid_argument("bridge_rate_J: path must start at a");
    if ((xi.values.row(xi.intervals()).transpose() - problem.b).lpNorm<Eigen::Infinity>() > 1e-9)
        throw std::invalid_argument("bridge_rate_J: path must end at b");
    GridPath h = control_from_path(*problem.fields, xi, problem.beta0);
    // proxy norm on the rate problem's control times, for consistency with
    // the endpoint minimum
    const int M = 1 << problem.control_level;
    if (h.intervals() % M != 0)
        throw std::invalid_argument("bridge_rate_J: path grid must refine the control grid");
    Eigen::VectorXd times(M);
    Eigen::MatrixXd values(M, h.dim);
    const int stride = h.intervals() / M;
    for (int i = 0; i < M; ++i) {
        times[i] = h.time((i + 1) * stride);
        values.row(i) = h.values.row((i + 1) * stride);
    }
    CameronMartinElement elem(problem.cov, times, values);
    BridgeRateResult out;
    out.raw_energy = 0.5 * cm_norm_sq(elem);
    out.value = out.raw_energy - endpoint_rate.value;
    out.upper_bound = problem.fields->driver_dim() > problem.fields->state_dim();
    return out;
}

BetaFn beta_constant(double value) {
    return [value](double) { return value; };
}

BetaFn beta_power_h(double hurst) {
    return [hurst](double eps) { return std::pow(eps, 1.0 / hurst); };
}

VaradhanReport varadhan_sweep(const RateProblem& problem, const VaradhanParams& params) {
    if (params.epsilons.empty()) throw std::invalid_argument("varadhan_sweep: empty epsilon list");
    for (size_t i = 1; i < params.epsilons.size(); ++i)
        if (params.epsilons[i] >= params.epsilons[i - 1])
            throw std::invalid_argument("varadhan_sweep: epsilons must decrease");
    if (params.n_paths.empty()) throw std::invalid_argument("varadhan_sweep: missing path counts");
    BetaFn beta = params.beta ? params.beta : beta_constant(1.0);

    // the minimizer doubles as the importance-sampling shift
    RateProblem rp = problem;
    rp.beta0 = beta(0.0);
    RateResult rate = rate_endpoint(rp);

    VaradhanReport report;
    report.rate_value = rate.value;

    const int L = params.sample_level;
    const int d = problem.cov.dim();
    const double hurst_min = problem.cov.hurst.minCoeff();
    const bool young = hurst_min > 0.5;
    FbmSampler sampler(problem.cov, L);

    // shift values on the sample grid and the Gram data for the exact
    // finite-dimensional likelihood ratio
    GridPath hstar = resample_to_level(rate.control_path, L);
    Eigen::VectorXd times(1 << L);
    for (int i = 0; i < (1 << L); ++i) times[i] = problem.cov.horizon * (i + 1) / (1 << L);
    std::vector<Eigen::VectorXd> gram_alpha(d);  // Sigma^{-1} u per component
    Eigen::VectorXd u_sq(d);
    for (int j = 0; j < d; ++j) {
        Eigen::MatrixXd sigma = covariance_matrix(problem.cov, j, times);
        Eigen::VectorXd u = hstar.values.col(j).tail(1 << L);
        gram_alpha[j] = Eigen::LLT<Eigen::MatrixXd>(sigma).solve(u);
        u_sq[j] = u.dot(gram_alpha[j]);
    }

    for (size_t k = 0; k < params.epsilons.size(); ++k) {
        const double eps = params.epsilons[k];
        const int n = params.n_paths[std::min(k, params.n_paths.size() - 1)];
        const double sigma = params.sigma_coeff * eps;
        const double beta_eps = beta(eps);
        std::vector<double> f_sigma(n), f_half(n);
        const int e = (int)problem.b.size();
        const double log_norm_s = -0.5 * e * (std::log(2.0 * M_PI) + 2.0 * std::log(sigma));
        const double log_norm_h = -0.5 * e * (std::log(2.0 * M_PI) + 2.0 * std::log(sigma / 2));

        for (int p = 0; p < n; ++p) {
            GridPath w = sampler.sample(derive_seed(params.seed, k, 0x5eed), p);
            double log_lr = 0.0;
            if (params.importance_sampling) {
                for (int j = 0; j < d; ++j) {
                    Eigen::VectorXd wj = w.values.col(j).tail(1 << L);
                    log_lr += -gram_alpha[j].dot(wj) / eps - 0.5 * u_sq[j] / (eps * eps);
                }
                w.values += hstar.values / eps;
            }
            Eigen::VectorXd yT;
            SolveOptions so;
            so.two_grid_estimate = false;
            if (young) {
                SolutionPath sol = solve_young(*problem.fields, scale_path(w, eps), problem.a,
                                               beta_eps, so);
                yT = sol.states.values.row(sol.states.intervals()).transpose();
            } else {
                RoughPathGrid X = lift_dyadic(w, L, params.degree);
                SolutionPath sol = solve_rde(*problem.fields, /*driver=*/
                                             [&] {
                                                 std::vector<GroupTensorD> blocks;
                                                 blocks.reserve(X.intervals());
                                                 for (int i = 0; i < X.intervals(); ++i)
                                                     blocks.push_back(dilation(X.increment(i), eps));
                                                 return RoughPathGrid(X.dim(), X.degree(), X.level(),
                                                                      X.horizon(), std::move(blocks));
                                             }(),
                                             problem.a, beta_eps, so);
                yT = sol.states.values.row(sol.states.intervals()).transpose();
            }
            double q = (yT - problem.b).squaredNorm();
            double lr = std::exp(log_lr);
            f_sigma[p] = std::exp(log_norm_s - q / (2.0 * sigma * sigma)) * lr;
            f_half[p] = std::exp(log_norm_h - q / (2.0 * sigma * sigma / 4.0)) * lr;
        }

        std::vector<double> combined(n);
        for (int p = 0; p < n; ++p)
            combined[p] = params.richardson ? (4.0 * f_half[p] - f_sigma[p]) / 3.0 : f_sigma[p];
        VaradhanPoint pt;
        pt.epsilon = eps;
        pt.n_paths = n;
        pt.p_hat = mean(combined);
        pt.standard_error = standard_error(combined);
        pt.used_importance = params.importance_sampling;
        if (pt.p_hat <= 0.0)
            throw NumericalError("varadhan_sweep: density estimate underflowed at epsilon = "
                                 + std::to_string(eps) + "; enable importance sampling");
        pt.rel_se = pt.standard_error / pt.p_hat;
        pt.eps2_log_p = eps * eps * std::log(pt.p_hat);
        pt.gap_to_rate = std::abs(pt.eps2_log_p + rate.value);
        report.points.push_back(pt);
    }

    // linear-in-eps^2 extrapolation of eps^2 log p
    std::vector<double> xs, ys;
    for (const auto& pt : report.points) {
        xs.push_back(pt.epsilon * pt.epsilon);
        ys.push_back(pt.eps2_log_p);
    }
    if (xs.size() >= 2) report.extrapolated_limit = linear_fit(xs, ys).intercept;
    return report;
}

TailProbeReport tail_probe(const CovarianceModel& cov, const std::vector<double>& radii,
                           const TailProbeParams& params) {
    for (size_t i = 1; i < radii.size(); ++i)
        if (radii[i] <= radii[i - 1])
            throw std::invalid_argument("tail_probe: radii must increase");
    FbmSampler sampler(cov, params.level);
    std::vector<double> norms(params.n_paths);
    NormMode mode = NormMode::holder(params.alpha);
    for (int p = 0; p < params.n_paths; ++p) {
        GridPath w = sampler.sample(params.seed, p);
        RoughPathGrid X = lift_dyadic(w, params.level, params.degree);
        norms[p] = homogeneous_norm(X, mode);
    }
    TailProbeReport rep;
    std::vector<double> xs, ys;
    for (double r : radii) {
        TailProbeRow row;
        row.radius = r;
        for (double v : norms)
            if (v >= r) ++row.exceedances;
        row.probability = (double)row.exceedances / params.n_paths;
        row.in_fit = row.exceedances >= params.min_exceedances && r > 0.0;
        if (row.in_fit) {
            xs.push_back(r * r);
            ys.push_back(std::log(row.probability));
        }
        rep.rows.push_back(row);
    }
    if (xs.size() >= 2) {
        LinearFit f = linear_fit(xs, ys);
        rep.slope = f.slope;
        rep.intercept = f.intercept;
        rep.fit_valid = true;
    }
    return rep;
}

}  // namespace fdb
