#include "fdb/solvers.hpp"

#include "fdb/errors.hpp"
#include "fdb/lift.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace fdb {

namespace {

void check_state(const Eigen::VectorXd& y, int step, double threshold) {
    if (!y.allFinite() || y.lpNorm<Eigen::Infinity>() > threshold)
        throw NumericalError("solver: blow-up detected at grid index " + std::to_string(step));
}

GridPath euler_states(const VectorFieldSystem& V, const GridPath& driver,
                      const Eigen::VectorXd& a, double beta, double threshold) {
    if ((int)a.size() != V.state_dim())
        throw std::invalid_argument("solve: initial state dimension mismatch");
    if (driver.dim != V.driver_dim())
        throw std::invalid_argument("solve: driver dimension mismatch");
    GridPath out(V.state_dim(), driver.horizon, driver.level);
    Eigen::VectorXd y = a;
    out.values.row(0) = y.transpose();
    const double dt = driver.dt();
    for (int i = 0; i < driver.intervals(); ++i) {
        y += V.diffusion(y) * driver.increment(i, i + 1) + beta * dt * V.drift(y);
        check_state(y, i + 1, threshold);
        out.values.row(i + 1) = y.transpose();
    }
    return out;
}

double compare_on_coarse(const GridPath& fine, const GridPath& coarse) {
    const int stride = 1 << (fine.level - coarse.level);
    double sup = 0.0;
    for (int i = 0; i <= coarse.intervals(); ++i)
        sup = std::max(sup, (fine.values.row(i * stride) - coarse.values.row(i)).lpNorm<Eigen::Infinity>());
    return sup;
}

// One step of the degree-k Euler scheme for the block X over [t_i, t_{i+1}].
Eigen::VectorXd rde_step(const VectorFieldSystem& V, const Eigen::VectorXd& y,
                         const GroupTensorD& block) {
    const int d = block.dim;
    const int e = (int)y.size();
    Eigen::MatrixXd Vy = V.diffusion(y);
    Eigen::VectorXd dy = Vy * block.level1;
    if (block.degree >= 2) {
        std::vector<Eigen::MatrixXd> jac(d);
        for (int j = 0; j < d; ++j) jac[j] = V.jacobian(y, j + 1);
        // word (i,j): (grad V_j . V_i) X^{2,ij}
        for (int i = 0; i < d; ++i) {
            for (int j = 0; j < d; ++j) {
                double w = block.level2(i, j);
                if (w != 0.0) dy += w * (jac[j] * Vy.col(i));
            }
        }
        if (block.degree >= 3) {
            // word (i,j,k): [grad^2 V_k (V_j, V_i) + grad V_k grad V_j V_i] X^{3,ijk}
            for (int k = 0; k < d; ++k) {
                std::vector<Eigen::MatrixXd> hess(e);
                for (int c = 0; c < e; ++c) hess[c] = V.hessian(y, k + 1, c);
                for (int i = 0; i < d; ++i) {
                    for (int j = 0; j < d; ++j) {
                        double w = block.level3(i, j * d + k);
                        if (w == 0.0) continue;
                        Eigen::VectorXd term = jac[k] * (jac[j] * Vy.col(i));
                        for (int c = 0; c < e; ++c)
                            term(c) += Vy.col(i).dot(hess[c] * Vy.col(j));
                        dy += w * term;
                    }
                }
            }
        }
    }
    return dy;
}

GridPath rde_states(const VectorFieldSystem& V, const RoughPathGrid& driver,
                    const Eigen::VectorXd& a, double threshold) {
    GridPath out(V.state_dim(), driver.horizon(), driver.level());
    Eigen::VectorXd y = a;
    out.values.row(0) = y.transpose();
    for (int i = 0; i < driver.intervals(); ++i) {
        y += rde_step(V, y, driver.increment(i));
        check_state(y, i + 1, threshold);
        out.values.row(i + 1) = y.transpose();
    }
    return out;
}

// Augmented system over R^{d+1}: columns V_1..V_d, then beta V_0.
VectorFieldSystem augment_with_drift(const VectorFieldSystem& V, double beta) {
    const int e = V.state_dim(), d = V.driver_dim();
    auto diffusion = [&V, beta, e, d](const Eigen::VectorXd& y) {
        Eigen::MatrixXd m(e, d + 1);
        m.leftCols(d) = V.diffusion(y);
        m.col(d) = beta * V.drift(y);
        return m;
    };
    auto drift = [e](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(e).eval(); };
    auto jac = [&V, beta, e](const Eigen::VectorXd& y, int j) {
        if (j == 0) return Eigen::MatrixXd::Zero(e, e).eval();
        int d = V.driver_dim();
        if (j <= d) return V.jacobian(y, j);
        return (beta * V.jacobian(y, 0)).eval();
    };
    auto hess = [&V, beta, e](const Eigen::VectorXd& y, int j, int c) {
        if (j == 0) return Eigen::MatrixXd::Zero(e, e).eval();
        int d = V.driver_dim();
        if (j <= d) return V.hessian(y, j, c);
        return (beta * V.hessian(y, 0, c)).eval();
    };
    return VectorFieldSystem(e, d + 1, diffusion, drift, jac, hess);
}

}  // namespace

SolutionPath solve_young(const VectorFieldSystem& V, const GridPath& driver,
                         const Eigen::VectorXd& a, double beta, const SolveOptions& opts) {
    SolutionPath sol;
    sol.scheme = "young-euler";
    sol.level = driver.level;
    sol.states = euler_states(V, driver, a, beta, opts.blowup_threshold);
    if (opts.two_grid_estimate && driver.level >= 1) {
        GridPath coarse = euler_states(V, restrict_to_level(driver, driver.level - 1), a, beta,
                                       opts.blowup_threshold);
        sol.two_grid_error = compare_on_coarse(sol.states, coarse);
    }
    return sol;
}

SolutionPath solve_skeleton(const VectorFieldSystem& V, const GridPath& h,
                            const Eigen::VectorXd& a, double beta0, const SolveOptions& opts) {
    SolutionPath sol = solve_young(V, h, a, beta0, opts);
    sol.scheme = "skeleton-euler";
    return sol;
}

SolutionPath solve_rde(const VectorFieldSystem& V, const RoughPathGrid& driver,
                       const Eigen::VectorXd& a, double beta, const SolveOptions& opts) {
    if (driver.degree() < 2 || driver.degree() > 3)
        throw std::invalid_argument("solve_rde: driver degree must be 2 or 3");
    const bool with_drift = beta != 0.0;
    SolutionPath sol;
    sol.scheme = "rde-step" + std::to_string(driver.degree());
    sol.level = driver.level();
    if ((int)a.size() != V.state_dim())
        throw std::invalid_argument("solve_rde: initial state dimension mismatch");
    if (driver.dim() != V.driver_dim())
        throw std::invalid_argument("solve_rde: driver dimension mismatch");
    if (with_drift) {
        VectorFieldSystem aug = augment_with_drift(V, beta);
        RoughPathGrid paired = young_pair_time(driver, 1.0);
        sol.states = rde_states(aug, paired, a, opts.blowup_threshold);
        if (opts.two_grid_estimate && driver.level() >= 1) {
            RoughPathGrid coarse = young_pair_time(driver.restrict_to_coarser(driver.level() - 1), 1.0);
            GridPath cs = rde_states(aug, coarse, a, opts.blowup_threshold);
            sol.two_grid_error = compare_on_coarse(sol.states, cs);
        }
    } else {
        sol.states = rde_states(V, driver, a, opts.blowup_threshold);
        if (opts.two_grid_estimate && driver.level() >= 1) {
            GridPath cs = rde_states(V, driver.restrict_to_coarser(driver.level() - 1), a,
                                     opts.blowup_threshold);
            sol.two_grid_error = compare_on_coarse(sol.states, cs);
        }
    }
    return sol;
}

EllipticityReport ellipticity_check(const VectorFieldSystem& V, const Eigen::VectorXd& z) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(V.diffusion(z));
    EllipticityReport rep;
    const auto& sv = svd.singularValues();
    double tol = 1e-12 * std::max(1.0, (double)sv(0));
    rep.rank = (int)(sv.array() > tol).count();
    rep.sigma_min = sv(sv.size() - 1);
    rep.elliptic = rep.rank == V.state_dim();
    return rep;
}

GridPath control_from_path(const VectorFieldSystem& V, const GridPath& phi, double beta,
                           double sigma_min_threshold) {
    if (phi.dim != V.state_dim())
        throw std::invalid_argument("control_from_path: path/state dimension mismatch");
    const int n = phi.intervals();
    const double dt = phi.dt();
    // phi' by centered differences in the interior, one-sided at the ends
    Eigen::MatrixXd deriv(n + 1, phi.dim);
    deriv.row(0) = (phi.values.row(1) - phi.values.row(0)) / dt;
    deriv.row(n) = (phi.values.row(n) - phi.values.row(n - 1)) / dt;
    for (int i = 1; i < n; ++i)
        deriv.row(i) = (phi.values.row(i + 1) - phi.values.row(i - 1)) / (2.0 * dt);

    GridPath h(V.driver_dim(), phi.horizon, phi.level);
    const int e = V.state_dim();
    Eigen::MatrixXd hprime(n + 1, V.driver_dim());
    for (int i = 0; i <= n; ++i) {
        Eigen::VectorXd y = phi.values.row(i).transpose();
        Eigen::MatrixXd Vy = V.diffusion(y);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(Vy);
        const auto& sv = svd.singularValues();
        if ((int)sv.size() < e || sv(e - 1) < sigma_min_threshold)
            throw NumericalError("control_from_path: ellipticity failure at t = "
                                 + std::to_string(phi.time(i)));
        Eigen::MatrixXd gram = Vy * Vy.transpose();
        Eigen::VectorXd rhs = deriv.row(i).transpose() - beta * V.drift(y);
        hprime.row(i) = (Vy.transpose() * gram.ldlt().solve(rhs)).transpose();
    }
    for (int i = 0; i < n; ++i)
        h.values.row(i + 1) = h.values.row(i) + 0.5 * dt * (hprime.row(i) + hprime.row(i + 1));
    return h;
}

}  // namespace fdb
