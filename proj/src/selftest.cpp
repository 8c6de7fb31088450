#include "fdb/selftest.hpp"

#include "fdb/bridge.hpp"
#include "fdb/cameron_martin.hpp"
#include "fdb/covariance.hpp"
#include "fdb/io.hpp"
#include "fdb/ldp.hpp"
#include "fdb/lift.hpp"
#include "fdb/path_norms.hpp"
#include "fdb/sampling.hpp"
#include "fdb/solvers.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace fdb {

namespace {

struct Check {
    std::string name;
    std::function<double()> metric;  // returns a defect; passes when <= tol
    double tol;
};

Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }

}  // namespace

bool run_selftest(std::ostream& out, std::uint64_t seed) {
    std::vector<Check> checks;

    checks.push_back({"tensor.group_inverse", [seed] {
        GaussianStream g(derive_seed(seed, 1));
        double worst = 0.0;
        for (int rep = 0; rep < 20; ++rep) {
            GroupTensorD x = segment_signature<double>(g.vector(3), 3);
            x = tensor_mul(x, segment_signature<double>(g.vector(3), 3));
            GroupTensorD id = tensor_mul(x, tensor_inverse(x));
            id.level1 -= GroupTensorD::identity(3, 3).level1;
            worst = std::max(worst, id.max_abs() / (1.0 + x.max_abs()));
        }
        return worst;
    }, 1e-12});

    checks.push_back({"tensor.segment_example", [] {
        GroupTensorD s = segment_signature<double>(v1(2.0), 3);
        return std::abs(s.level1(0) - 2.0) + std::abs(s.level2(0, 0) - 2.0)
             + std::abs(s.level3(0, 0) - 4.0 / 3.0);
    }, 1e-14});

    checks.push_back({"tensor.corner_area", [] {
        GridPath p(2, 1.0, 1);
        p.values << 0, 0, 1, 0, 1, 1;
        GroupTensorD s = signature_piecewise_linear(p, 0, 2, 2);
        return std::abs(s.level2(0, 1) - 1.0) + std::abs(s.level2(1, 0) - 0.0);
    }, 1e-14});

    checks.push_back({"norms.holder_identity", [] {
        TwoParamFunction eta;
        eta.grid_intervals = 64;
        eta.abs_value = [](int i, int j) { return (j - i) / 64.0; };
        return std::abs(holder_norm(eta, 0.5, 1.0) - 1.0);
    }, 1e-12});

    checks.push_back({"norms.besov_closed_form", [] {
        const double alpha = 0.4, m = 2.0;
        TwoParamFunction eta;
        eta.grid_intervals = 1 << 10;
        eta.abs_value = [&eta](int i, int j) { return (double)(j - i) / eta.grid_intervals; };
        double p = (1.0 - alpha) * m;
        double exact = std::pow(1.0 / (p * (p + 1.0)), 1.0 / m);
        return std::abs(besov_norm(eta, alpha, m, 1.0) / exact - 1.0);
    }, 0.02});

    checks.push_back({"norms.pvar_zigzag", [] {
        GridPath p(1, 1.0, 2);
        p.values << 0, 1, 0, 1, 0;
        double direct = pvar_norm(p, 1.0, 0, 3);
        return std::abs(direct - 3.0);
    }, 1e-14});

    checks.push_back({"gaussian.covariance_bm", [] {
        CovarianceModel bm(Eigen::VectorXd::Constant(1, 0.5), 1.0);
        return std::abs(covariance(bm, 0, 0.25, 0.75) - 0.25);
    }, 1e-15});

    checks.push_back({"gaussian.cm_norm_scalar", [] {
        CovarianceModel bm(Eigen::VectorXd::Constant(1, 0.5), 1.0);
        CameronMartinElement elem(bm, Eigen::VectorXd::Constant(1, 1.0),
                                  Eigen::MatrixXd::Constant(1, 1, 2.0));
        return std::abs(cm_norm_sq(elem) - 4.0);
    }, 1e-12});

    checks.push_back({"lift.chen_shuffle_certificate", [seed] {
        CovarianceModel fbm(Eigen::VectorXd::Constant(2, 0.4), 1.0);
        GridPath w = FbmSampler(fbm, 8).sample(derive_seed(seed, 2), 0);
        RoughPathGrid X = lift_dyadic(w, 8, 2);
        double worst = X.shuffle_certificate();
        GaussianStream g(derive_seed(seed, 3));
        for (int rep = 0; rep < 50; ++rep) {
            int s = (int)(std::abs(g()) * 50) % 200;
            int t = s + 1 + (int)(std::abs(g()) * 20) % (256 - s - 1);
            int u = s + (t - s) / 2;
            worst = std::max(worst, chen_defect(X, s, u, t));
        }
        return worst;
    }, 1e-10});

    checks.push_back({"lift.translation_identity", [seed] {
        GaussianStream g(derive_seed(seed, 4));
        GridPath x(2, 1.0, 5), k(2, 1.0, 5);
        for (int i = 1; i <= 32; ++i) {
            x.values.row(i) = x.values.row(i - 1) + 0.3 * g.vector(2).transpose();
            k.values.row(i) = k.values.row(i - 1) + 0.3 * g.vector(2).transpose();
        }
        RoughPathGrid tx = young_translation(lift_dyadic(x, 5, 3), k);
        RoughPathGrid direct = lift_dyadic(add_paths(x, k), 5, 3);
        double worst = 0.0;
        for (int i = 0; i < 32; ++i)
            worst = std::max(worst, tensor_max_abs_diff(tx.increment(i), direct.increment(i)));
        return worst;
    }, 1e-12});

    checks.push_back({"solvers.constant_fields_exact", [seed] {
        GaussianStream g(derive_seed(seed, 5));
        GridPath w(2, 1.0, 6);
        for (int i = 1; i <= 64; ++i)
            w.values.row(i) = w.values.row(i - 1) + 0.1 * g.vector(2).transpose();
        auto V = identity_fields(2, Eigen::VectorXd::Constant(2, 0.5));
        SolutionPath sol = solve_young(V, w, Eigen::VectorXd::Zero(2), 1.0);
        Eigen::VectorXd expect = w.values.row(64).transpose() + Eigen::VectorXd::Constant(2, 0.5);
        return (sol.states.values.row(64).transpose() - expect).lpNorm<Eigen::Infinity>();
    }, 1e-12});

    checks.push_back({"solvers.exponential_drift", [] {
        auto one = [](const Eigen::VectorXd& y) { return y; };
        auto V = VectorFieldSystem(1, 1,
            [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1).eval(); },
            one);
        GridPath zero(1, 1.0, 12);
        SolutionPath sol = solve_young(V, zero, v1(1.0), 1.0);
        return std::abs(sol.states.values(1 << 12, 0) - std::exp(1.0)) / std::exp(1.0);
    }, 1e-3});

    checks.push_back({"bridge.bm_marginal", [] {
        MarkovModel bm{GaussTransition1D::brownian(), 1};
        BridgeFdd fdd(bm, Eigen::VectorXd::LinSpaced(2, 0.5, 1.0), v1(0.0), v1(1.0));
        Eigen::VectorXd mean;
        double var;
        fdd.marginal(0, mean, var);
        return std::abs(mean[0] - 0.5) + std::abs(var - 0.25);
    }, 1e-12});

    checks.push_back({"ldp.rate_identity_bm", [] {
        RateProblem prob;
        prob.fields = std::make_shared<VectorFieldSystem>(identity_fields(1));
        prob.cov = CovarianceModel(Eigen::VectorXd::Constant(1, 0.5), 1.0);
        prob.a = v1(0.0);
        prob.b = v1(2.0);
        prob.control_level = 4;
        prob.solve_level = 7;
        RateResult r = rate_endpoint(prob);
        return std::abs(r.value - 2.0);
    }, 1e-3});

    checks.push_back({"bridge.density_estimate_point_mass", [] {
        std::vector<Eigen::VectorXd> terms(200, v1(0.7));
        DensityEstimate est = density_estimate(terms, v1(0.7), 0.1);
        return std::abs(est.value - 1.0 / std::sqrt(2.0 * M_PI * 0.01));
    }, 1e-9});

    bool all_ok = true;
    char line[160];
    for (const auto& c : checks) {
        double metric = c.metric();
        bool ok = metric <= c.tol;
        all_ok = all_ok && ok;
        std::snprintf(line, sizeof(line), "%-36s %s  metric=%.6e tol=%.1e\n", c.name.c_str(),
                      ok ? "pass" : "FAIL", metric, c.tol);
        out << line;
    }
    out << (all_ok ? "selftest: all checks passed\n" : "selftest: FAILURES present\n");
    return all_ok;
}

}  // namespace fdb
