#include "fdb/bridge.hpp"
#include "fdb/ldp.hpp"
#include "fdb/stats.hpp"

#include <doctest.h>

#include <cmath>
#include <memory>

using namespace fdb;

namespace {

Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }

RateProblem identity_problem(double hurst, double b, double T = 1.0) {
    RateProblem prob;
    prob.fields = std::make_shared<VectorFieldSystem>(identity_fields(1));
    prob.cov = CovarianceModel(Eigen::VectorXd::Constant(1, hurst), T);
    prob.a = v1(0.0);
    prob.b = v1(b);
    prob.beta0 = 0.0;
    prob.control_level = 4;
    prob.solve_level = 8;
    return prob;
}

}  // namespace

TEST_CASE("rate_endpoint") {
    SUBCASE("Brownian scalar formula b^2 / (2 T^{2H})") {
        RateResult r = rate_endpoint(identity_problem(0.5, 2.0));
        CHECK(std::abs(r.value - 2.0) < 1e-3);
        CHECK(r.residual < 1e-5);
        // minimizing control is the straight line
        for (int i = 0; i <= 16; ++i) {
            double t = i / 16.0;
            CHECK(std::abs(r.control_path.values(i * 16, 0) - 2.0 * t) < 2e-3);
        }
    }
    SUBCASE("H = 0.7 keeps the scalar formula") {
        RateResult r = rate_endpoint(identity_problem(0.7, 2.0));
        CHECK(std::abs(r.value - 2.0) < 1e-3);
        RateResult rt = rate_endpoint(identity_problem(0.7, 2.0, 2.0));
        CHECK(std::abs(rt.value - 4.0 / (2.0 * std::pow(2.0, 1.4))) < 1e-3);
    }
    SUBCASE("coincident endpoints cost nothing") {
        RateResult r = rate_endpoint(identity_problem(0.5, 0.0));
        CHECK(r.value < 1e-8);
        CHECK(r.control_values.lpNorm<Eigen::Infinity>() < 1e-4);
    }
    SUBCASE("value decreases under control refinement") {
        RateProblem coarse = identity_problem(0.5, 1.5);
        coarse.control_level = 2;
        RateProblem fine = identity_problem(0.5, 1.5);
        fine.control_level = 5;
        double vc = rate_endpoint(coarse).value;
        double vf = rate_endpoint(fine).value;
        CHECK(vf <= vc + 1e-4);
    }
    SUBCASE("orthogonal mixing of driver components leaves the value invariant") {
        // rotate identity fields in d = e = 2
        double c = std::cos(0.7), s = std::sin(0.7);
        Eigen::MatrixXd rot(2, 2);
        rot << c, -s, s, c;
        std::vector<Eigen::MatrixXd> A(2, Eigen::MatrixXd::Zero(2, 2));
        std::vector<Eigen::VectorXd> b{rot.col(0), rot.col(1)};
        RateProblem prob;
        prob.fields = std::make_shared<VectorFieldSystem>(
            linear_fields(A, b, Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2)));
        prob.cov = CovarianceModel(Eigen::VectorXd::Constant(2, 0.5), 1.0);
        prob.a = Eigen::VectorXd::Zero(2);
        prob.b = (Eigen::VectorXd(2) << 1.0, -0.5).finished();
        prob.control_level = 3;
        prob.solve_level = 7;
        double rotated = rate_endpoint(prob).value;
        RateProblem plain = prob;
        plain.fields = std::make_shared<VectorFieldSystem>(identity_fields(2));
        double straight = rate_endpoint(plain).value;
        CHECK(std::abs(rotated - straight) < 1e-3);
    }
}

TEST_CASE("schilder_rate") {
    CovarianceModel bm(Eigen::VectorXd::Constant(1, 0.5), 1.0);
    SUBCASE("zero element") {
        CameronMartinElement elem(bm, Eigen::VectorXd::Constant(1, 1.0),
                                  Eigen::MatrixXd::Zero(1, 1));
        CHECK(schilder_rate(elem) == 0.0);
    }
    SUBCASE("unit endpoint needs energy 1/2") {
        CameronMartinElement elem(bm, Eigen::VectorXd::Constant(1, 1.0),
                                  Eigen::MatrixXd::Constant(1, 1, 1.0));
        CHECK(schilder_rate(elem) == doctest::Approx(0.5).epsilon(1e-12));
    }
    SUBCASE("additive over independent components") {
        CovarianceModel pair(Eigen::VectorXd::Constant(2, 0.4), 1.0);
        Eigen::MatrixXd vals(1, 2);
        vals << 0.7, -1.2;
        CameronMartinElement both(pair, Eigen::VectorXd::Constant(1, 1.0), vals);
        CovarianceModel single(Eigen::VectorXd::Constant(1, 0.4), 1.0);
        CameronMartinElement first(single, Eigen::VectorXd::Constant(1, 1.0),
                                   Eigen::MatrixXd::Constant(1, 1, 0.7));
        CameronMartinElement second(single, Eigen::VectorXd::Constant(1, 1.0),
                                    Eigen::MatrixXd::Constant(1, 1, -1.2));
        CHECK(schilder_rate(both)
              == doctest::Approx(schilder_rate(first) + schilder_rate(second)).epsilon(1e-12));
    }
}

TEST_CASE("bridge_rate_J") {
    RateProblem prob = identity_problem(0.5, 2.0);
    RateResult endpoint = rate_endpoint(prob);

    SUBCASE("the skeleton image of the minimizer has zero excess") {
        SolveOptions fast;
        fast.two_grid_estimate = false;
        SolutionPath xi = solve_skeleton(*prob.fields, endpoint.control_path, prob.a, prob.beta0,
                                         fast);
        GridPath path = xi.states;
        // pin the terminal exactly at b before measuring the excess
        path.values.row(path.intervals()) = prob.b.transpose();
        BridgeRateResult j = bridge_rate_J(path, prob, endpoint);
        CHECK(std::abs(j.value) < 1e-3);
    }
    SUBCASE("linear path achieves the minimum") {
        GridPath line = straight_line_bridge(v1(0.0), v1(2.0), 1.0, prob.solve_level);
        BridgeRateResult j = bridge_rate_J(line, prob, endpoint);
        CHECK(std::abs(j.value) < 1e-3);
        CHECK_FALSE(j.upper_bound);
    }
    SUBCASE("a detour costs extra Dirichlet energy") {
        GridPath detour(1, 1.0, prob.solve_level);
        const int n = detour.intervals();
        for (int i = 0; i <= n; ++i) {
            double t = (double)i / n;
            detour.values(i, 0) = t <= 0.5 ? 5.0 * t : 2.5 - (t - 0.5);
        }
        BridgeRateResult j = bridge_rate_J(detour, prob, endpoint);
        // piecewise Dirichlet energy; the centered-difference control smooths
        // the kink over two grid cells, hence the O(dt) slack
        double dirichlet = 0.5 * (25.0 * 0.5 + 1.0 * 0.5);
        double slack = 30.0 / (1 << prob.solve_level);
        CHECK(std::abs(j.raw_energy - dirichlet) < slack);
        CHECK(std::abs(j.value - (dirichlet - 2.0)) < slack);
        CHECK(j.value > 0.0);
    }
    SUBCASE("endpoint mismatch rejected") {
        GridPath wrong = straight_line_bridge(v1(0.0), v1(1.0), 1.0, prob.solve_level);
        CHECK_THROWS_AS(bridge_rate_J(wrong, prob, endpoint), std::invalid_argument);
    }
}

TEST_CASE("varadhan_sweep") {
    SUBCASE("coincident endpoints give a vanishing limit") {
        RateProblem prob = identity_problem(0.5, 0.0);
        VaradhanParams params;
        params.epsilons = {0.5, 0.35};
        params.n_paths = {4000};
        params.sample_level = 5;
        params.seed = 91;
        params.sigma_coeff = 0.3;
        params.importance_sampling = false;
        VaradhanReport rep = varadhan_sweep(prob, params);
        CHECK(rep.rate_value < 1e-6);
        for (const auto& pt : rep.points) CHECK(std::abs(pt.eps2_log_p) < 0.5);
    }
    SUBCASE("H = 0.7 identity-field limit") {
        RateProblem prob = identity_problem(0.7, 1.0);
        VaradhanParams params;
        params.epsilons = {0.4, 0.3, 0.22};
        params.n_paths = {20000};
        params.sample_level = 5;
        params.seed = 92;
        params.sigma_coeff = 0.05;
        VaradhanReport rep = varadhan_sweep(prob, params);
        CHECK(rep.rate_value == doctest::Approx(0.5).epsilon(1e-3));
        // eps^2 log p = -1/2 + eps^2 log(2 pi eps^2)^{-1/2} for the Gaussian law
        for (const auto& pt : rep.points) {
            double exact = -0.5 - 0.5 * pt.epsilon * pt.epsilon
                         * std::log(2 * M_PI * pt.epsilon * pt.epsilon);
            CHECK(std::abs(pt.eps2_log_p - exact) <= 3.0 * pt.epsilon * pt.epsilon * pt.rel_se);
        }
        CHECK(std::abs(rep.extrapolated_limit + 0.5) < 0.05);
    }
    SUBCASE("validation") {
        RateProblem prob = identity_problem(0.5, 1.0);
        VaradhanParams params;
        CHECK_THROWS_AS(varadhan_sweep(prob, params), std::invalid_argument);
        params.epsilons = {0.2, 0.5};
        params.n_paths = {100};
        CHECK_THROWS_AS(varadhan_sweep(prob, params), std::invalid_argument);
    }
    SUBCASE("beta schedules") {
        CHECK(beta_constant(2.0)(0.1) == 2.0);
        CHECK(beta_power_h(0.5)(0.25) == doctest::Approx(0.0625));
    }
}

TEST_CASE("tail_probe") {
    CovarianceModel bm(Eigen::VectorXd::Constant(1, 0.5), 1.0);
    TailProbeParams params;
    params.alpha = 0.4;
    params.degree = 1;  // level-1 Holder tail
    params.level = 8;
    params.n_paths = 1500;
    params.seed = 93;
    std::vector<double> radii{0.0, 0.5, 1.0, 1.5, 2.0, 2.5};
    TailProbeReport rep = tail_probe(bm, radii, params);

    SUBCASE("radius zero has probability one") {
        CHECK(rep.rows[0].probability == 1.0);
    }
    SUBCASE("probabilities are non-increasing") {
        for (size_t i = 1; i < rep.rows.size(); ++i)
            CHECK(rep.rows[i].probability <= rep.rows[i - 1].probability);
    }
    SUBCASE("Gaussian-type slope, stable across grid levels") {
        REQUIRE(rep.fit_valid);
        CHECK(rep.slope < 0.0);
        TailProbeParams p10 = params;
        p10.level = 10;
        TailProbeReport rep10 = tail_probe(bm, radii, p10);
        REQUIRE(rep10.fit_valid);
        CHECK(std::abs(rep10.slope / rep.slope) < 3.0);
        CHECK(std::abs(rep.slope / rep10.slope) < 3.0);
    }
    SUBCASE("radii must increase") {
        CHECK_THROWS_AS(tail_probe(bm, {1.0, 0.5}, params), std::invalid_argument);
    }
}
