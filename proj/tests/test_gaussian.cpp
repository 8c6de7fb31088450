#include "fdb/cameron_martin.hpp"
#include "fdb/covariance.hpp"
#include "fdb/sampling.hpp"
#include "fdb/stats.hpp"

#include <doctest.h>

#include <cmath>

using namespace fdb;

namespace {

CovarianceModel scalar_model(double h, double T = 1.0) {
    return CovarianceModel(Eigen::VectorXd::Constant(1, h), T);
}

// All pairs of uniform dyadic partitions up to the given depths.
double twoD_var_bruteforce(const CovarianceModel& m, double s, double t, double rho, int depth) {
    double best = 0.0;
    for (int d1 = 0; d1 <= depth; ++d1)
        for (int d2 = 0; d2 <= depth; ++d2) {
            int n1 = 1 << d1, n2 = 1 << d2;
            double h1 = (t - s) / n1, h2 = (t - s) / n2;
            double acc = 0.0;
            for (int a = 0; a < n1; ++a)
                for (int b = 0; b < n2; ++b)
                    acc += std::pow(std::abs(rect_increment(m, 0, s + a * h1, s + (a + 1) * h1,
                                                            s + b * h2, s + (b + 1) * h2)),
                                    rho);
            best = std::max(best, std::pow(acc, 1.0 / rho));
        }
    return best;
}

}  // namespace

TEST_CASE("covariance formula") {
    CovarianceModel bm = scalar_model(0.5);
    CHECK(covariance(bm, 0, 0.25, 0.75) == doctest::Approx(0.25).epsilon(1e-15));
    SUBCASE("variance at t") {
        for (double h : {0.3, 0.5, 0.75}) {
            CovarianceModel m = scalar_model(h);
            CHECK(covariance(m, 0, 1.0, 1.0) == doctest::Approx(1.0).epsilon(1e-14));
            CHECK(covariance(m, 0, 0.5, 0.5)
                  == doctest::Approx(std::pow(0.5, 2 * h)).epsilon(1e-14));
        }
    }
    SUBCASE("symmetry") {
        GaussianStream g(41);
        CovarianceModel m = scalar_model(0.35);
        for (int rep = 0; rep < 20; ++rep) {
            double s = std::abs(g()) / 4, t = std::abs(g()) / 4;
            CHECK(covariance(m, 0, s, t) == covariance(m, 0, t, s));
        }
    }
    SUBCASE("validation") {
        CHECK_THROWS_AS(scalar_model(1.2), std::invalid_argument);
        CHECK_THROWS_AS(covariance(bm, 0, -0.5, 0.5), std::invalid_argument);
        CHECK_THROWS_AS(covariance(bm, 2, 0.5, 0.5), std::invalid_argument);
    }
}

TEST_CASE("rect_increment") {
    SUBCASE("independent BM increments") {
        CovarianceModel bm = scalar_model(0.5);
        CHECK(rect_increment(bm, 0, 0.0, 1.0 / 3, 2.0 / 3, 1.0)
              == doctest::Approx(0.0).epsilon(1e-15));
    }
    SUBCASE("variance of an increment") {
        for (double h : {0.3, 0.6, 0.8}) {
            CovarianceModel m = scalar_model(h);
            CHECK(rect_increment(m, 0, 0.2, 0.7, 0.2, 0.7)
                  == doctest::Approx(std::pow(0.5, 2 * h)).epsilon(1e-12));
        }
    }
    SUBCASE("nested-interval bound for H > 1/2") {
        CovarianceModel m = scalar_model(0.75);
        const double bound_coeff = 2.0 * 0.75;  // 2H T^{2H-1}, T = 1
        GaussianStream g(42);
        for (int rep = 0; rep < 200; ++rep) {
            double s = std::abs(g()) / 4;
            double t = s + std::abs(g()) / 4 + 1e-3;
            if (t > 1.0) continue;
            double u = s + (t - s) * 0.3, v = s + (t - s) * 0.8;
            double lhs = std::abs(rect_increment(m, 0, s, t, u, v));
            CHECK(lhs <= bound_coeff * (v - u) + 1e-12);
        }
    }
    SUBCASE("order validation") {
        CHECK_THROWS_AS(rect_increment(scalar_model(0.5), 0, 0.5, 0.2, 0.0, 1.0),
                        std::invalid_argument);
    }
}

TEST_CASE("twoD_rho_variation") {
    SUBCASE("Brownian case sums variances of disjoint increments") {
        CovarianceModel bm = scalar_model(0.5);
        for (double t : {0.5, 1.0}) {
            CHECK(twoD_rho_variation(bm, 0, 0.0, t, 1.0, 6) == doctest::Approx(t).epsilon(1e-12));
            // brute force over pairs of dyadic partitions (the common-refinement
            // reduction is an upper bound family for rho = 1)
            CHECK(twoD_var_bruteforce(bm, 0.0, t, 1.0, 3) == doctest::Approx(t).epsilon(1e-12));
        }
    }
    SUBCASE("monotone in depth") {
        CovarianceModel m = scalar_model(0.4);
        double prev = 0.0;
        for (int depth = 0; depth <= 6; ++depth) {
            double cur = twoD_rho_variation(m, 0, 0.0, 1.0, 1.0 / 0.8, depth);
            CHECK(cur >= prev - 1e-14);
            prev = cur;
        }
    }
    SUBCASE("Holder-controlled constant is stable across sub-squares") {
        CovarianceModel m = scalar_model(0.4);
        const double rho = 1.0 / (2.0 * 0.4);
        double cmin = 1e300, cmax = 0.0;
        for (int dep = 0; dep <= 2; ++dep) {
            int n = 1 << dep;
            for (int i = 0; i < n; ++i) {
                double s = (double)i / n, t = (double)(i + 1) / n;
                double c = twoD_rho_variation(m, 0, s, t, rho, 5)
                         / std::pow(t - s, 2.0 * 0.4);
                cmin = std::min(cmin, c);
                cmax = std::max(cmax, c);
            }
        }
        CHECK(cmax / cmin < 1.25);
    }
}

TEST_CASE("sample_fbm") {
    SUBCASE("terminal variance at H = 0.7") {
        CovarianceModel m = scalar_model(0.7);
        const int n = 10000;
        auto paths = sample_fbm(m, 6, n, 777);
        std::vector<double> terminals(n);
        for (int i = 0; i < n; ++i) terminals[i] = paths[i].values(64, 0);
        double var = variance(terminals);
        double se = var * std::sqrt(2.0 / (n - 1));  // SE of a Gaussian sample variance
        CHECK(std::abs(var - 1.0) <= 3.0 * se);
    }
    SUBCASE("Brownian covariance of (w_1/2, w_1)") {
        CovarianceModel m = scalar_model(0.5);
        const int n = 20000;
        auto paths = sample_fbm(m, 4, n, 778);
        double c11 = 0, c12 = 0, c22 = 0;
        for (const auto& p : paths) {
            double x = p.values(8, 0), y = p.values(16, 0);
            c11 += x * x;
            c12 += x * y;
            c22 += y * y;
        }
        c11 /= n; c12 /= n; c22 /= n;
        CHECK(std::abs(c11 - 0.5) < 0.02);
        CHECK(std::abs(c12 - 0.5) < 0.03);
        CHECK(std::abs(c22 - 1.0) < 0.04);
    }
    SUBCASE("determinism") {
        CovarianceModel m(Eigen::VectorXd::Constant(2, 0.4), 2.0);
        auto a = sample_fbm(m, 5, 3, 99);
        auto b = sample_fbm(m, 5, 3, 99);
        for (int i = 0; i < 3; ++i) CHECK((a[i].values - b[i].values).norm() == 0.0);
        auto c = sample_fbm(m, 5, 3, 100);
        CHECK((a[0].values - c[0].values).norm() != 0.0);
    }
    SUBCASE("threaded sampling matches serial") {
        CovarianceModel m = scalar_model(0.45);
        auto serial = sample_fbm(m, 5, 8, 321, 1);
        auto parallel = sample_fbm(m, 5, 8, 321, 4);
        for (int i = 0; i < 8; ++i) CHECK((serial[i].values - parallel[i].values).norm() == 0.0);
    }
    SUBCASE("stationary increments in distribution") {
        CovarianceModel m = scalar_model(0.3);
        const int n = 8000;
        auto paths = sample_fbm(m, 5, n, 779);
        // increments over [1/4, 1/2] and [5/8, 7/8] share length 1/4
        std::vector<double> inc1(n), inc2(n);
        for (int i = 0; i < n; ++i) {
            inc1[i] = paths[i].values(16, 0) - paths[i].values(8, 0);
            inc2[i] = paths[i].values(28, 0) - paths[i].values(20, 0);
        }
        double v1 = variance(inc1), v2 = variance(inc2);
        double se = v1 * std::sqrt(2.0 / (n - 1));
        CHECK(std::abs(v1 - v2) <= 6.0 * se);
        CHECK(std::abs(mean(inc1)) <= 4.0 * standard_error(inc1));
    }
    SUBCASE("grid size guard") {
        CHECK_THROWS_AS(FbmSampler(scalar_model(0.5), 15), std::invalid_argument);
    }
}

TEST_CASE("cm_norm_sq") {
    SUBCASE("single terminal constraint") {
        CovarianceModel bm = scalar_model(0.5);
        CameronMartinElement elem(bm, Eigen::VectorXd::Constant(1, 1.0),
                                  Eigen::MatrixXd::Constant(1, 1, 2.0));
        CHECK(cm_norm_sq(elem) == doctest::Approx(4.0).epsilon(1e-13));
        CovarianceModel m7 = scalar_model(0.7, 2.0);
        CameronMartinElement e7(m7, Eigen::VectorXd::Constant(1, 2.0),
                                Eigen::MatrixXd::Constant(1, 1, 2.0));
        CHECK(cm_norm_sq(e7) == doctest::Approx(4.0 / std::pow(2.0, 1.4)).epsilon(1e-12));
    }
    SUBCASE("zero values give zero") {
        CovarianceModel m = scalar_model(0.35);
        CameronMartinElement elem(m, Eigen::VectorXd::LinSpaced(4, 0.25, 1.0),
                                  Eigen::MatrixXd::Zero(4, 1));
        CHECK(cm_norm_sq(elem) == 0.0);
    }
    SUBCASE("Brownian full-grid constraint is the Dirichlet energy") {
        CovarianceModel bm = scalar_model(0.5);
        const int n = 16;
        Eigen::VectorXd times(n);
        Eigen::MatrixXd values(n, 1);
        GaussianStream g(43);
        double prev = 0.0;
        double dirichlet = 0.0;
        for (int i = 0; i < n; ++i) {
            times[i] = (i + 1) / (double)n;
            values(i, 0) = prev + 0.2 * g();
            dirichlet += std::pow(values(i, 0) - prev, 2) / (1.0 / n);
            prev = values(i, 0);
        }
        CameronMartinElement elem(bm, times, values);
        CHECK(cm_norm_sq(elem) == doctest::Approx(dirichlet).epsilon(1e-10));
    }
    SUBCASE("monotone under added constraints") {
        GaussianStream g(44);
        for (double h : {0.35, 0.5, 0.7}) {
            CovarianceModel m = scalar_model(h);
            Eigen::VectorXd coarse_times(2), fine_times(4);
            coarse_times << 0.5, 1.0;
            fine_times << 0.25, 0.5, 0.75, 1.0;
            Eigen::MatrixXd fine_vals(4, 1);
            for (int i = 0; i < 4; ++i) fine_vals(i, 0) = g();
            Eigen::MatrixXd coarse_vals(2, 1);
            coarse_vals(0, 0) = fine_vals(1, 0);
            coarse_vals(1, 0) = fine_vals(3, 0);
            CameronMartinElement coarse(m, coarse_times, coarse_vals);
            CameronMartinElement fine(m, fine_times, fine_vals);
            CHECK(cm_norm_sq(coarse) <= cm_norm_sq(fine) + 1e-12);
        }
    }
    SUBCASE("near-singular Gram is reported, not jittered") {
        CovarianceModel m = scalar_model(0.5);
        Eigen::VectorXd times(2);
        times << 0.5, 0.5 + 4e-16;
        CHECK_THROWS(CameronMartinElement(m, times, Eigen::MatrixXd::Zero(2, 1)));
    }
}

TEST_CASE("cm_embedding_check") {
    CovarianceModel bm = scalar_model(0.5);
    SUBCASE("zero element") {
        CameronMartinElement elem(bm, Eigen::VectorXd::Constant(1, 1.0),
                                  Eigen::MatrixXd::Zero(1, 1));
        CHECK(cm_embedding_check(elem, 1.9, 6).max_ratio == 0.0);
    }
    SUBCASE("linear interpolant is stable under refinement") {
        CameronMartinElement elem(bm, Eigen::VectorXd::Constant(1, 1.0),
                                  Eigen::MatrixXd::Constant(1, 1, 1.0));
        double r6 = cm_embedding_check(elem, 1.9, 6).max_ratio;
        double r9 = cm_embedding_check(elem, 1.9, 9).max_ratio;
        CHECK(r6 > 0.0);
        CHECK(std::abs(r9 / r6 - 1.0) < 0.1);
    }
    SUBCASE("empirical constant bounded under refinement") {
        GaussianStream g(45);
        for (double h : {0.35, 0.7}) {
            CovarianceModel m = scalar_model(h);
            double q = 0.5 * (1.0 / (h + 0.5) + 2.0);
            for (int rep = 0; rep < 5; ++rep) {
                Eigen::VectorXd times(3);
                times << 0.3, 0.6, 1.0;
                Eigen::MatrixXd vals(3, 1);
                for (int i = 0; i < 3; ++i) vals(i, 0) = g();
                CameronMartinElement elem(m, times, vals);
                double r_coarse = cm_embedding_check(elem, q, 6).max_ratio;
                double r_fine = cm_embedding_check(elem, q, 9).max_ratio;
                CHECK(r_fine < 3.0 * r_coarse + 1e-12);
            }
        }
    }
    SUBCASE("q outside the admissible window") {
        CameronMartinElement elem(bm, Eigen::VectorXd::Constant(1, 1.0),
                                  Eigen::MatrixXd::Constant(1, 1, 1.0));
        CHECK_THROWS_AS(cm_embedding_check(elem, 2.3, 5), std::invalid_argument);
        CHECK_THROWS_AS(cm_embedding_check(elem, 0.6, 5), std::invalid_argument);
    }
}
