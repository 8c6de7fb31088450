#include "fdb/errors.hpp"
#include "fdb/lift.hpp"
#include "fdb/sampling.hpp"
#include "fdb/solvers.hpp"
#include "fdb/stats.hpp"

#include <doctest.h>

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>

using namespace fdb;

namespace {

Eigen::VectorXd v1(double x) { return Eigen::VectorXd::Constant(1, x); }

GridPath sine_driver(int level) {
    return make_grid_path(1, 1.0, level, [](double t) {
        return Eigen::VectorXd::Constant(1, std::sin(t)).eval();
    });
}

}  // namespace

TEST_CASE("solve_young") {
    SUBCASE("constant fields are integrated exactly") {
        GaussianStream g(61);
        GridPath w(2, 1.0, 5);
        for (int i = 1; i <= 32; ++i)
            w.values.row(i) = w.values.row(i - 1) + g.vector(2).transpose();
        Eigen::VectorXd drift(2);
        drift << -1.0, 2.0;
        auto V = identity_fields(2, drift);
        Eigen::VectorXd a(2);
        a << 0.5, 0.5;
        SolutionPath sol = solve_young(V, w, a, 0.7);
        Eigen::VectorXd expect = a + w.values.row(32).transpose() + 0.7 * drift;
        CHECK((sol.states.values.row(32).transpose() - expect).lpNorm<Eigen::Infinity>() < 1e-13);
        CHECK(sol.two_grid_error < 1e-13);
    }
    SUBCASE("geometric equation against the chain-rule solution") {
        auto V = VectorFieldSystem(1, 1,
            [](const Eigen::VectorXd& y) { return Eigen::MatrixXd(y); },
            [](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(1).eval(); });
        SolutionPath sol = solve_young(V, sine_driver(12), v1(1.5), 0.0);
        double exact = 1.5 * std::exp(std::sin(1.0));
        CHECK(std::abs(sol.states.values(1 << 12, 0) - exact) / exact < 1e-3);
        CHECK(sol.two_grid_error < 2e-3);
    }
    SUBCASE("pure drift exponential") {
        auto V = VectorFieldSystem(1, 1,
            [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1).eval(); },
            [](const Eigen::VectorXd& y) { return y; });
        SolutionPath sol = solve_young(V, GridPath(1, 1.0, 12), v1(1.0), 1.0);
        CHECK(std::abs(sol.states.values(1 << 12, 0) - std::exp(1.0)) / std::exp(1.0) < 1e-3);
    }
    SUBCASE("blow-up carries the first bad index") {
        auto V = VectorFieldSystem(1, 1,
            [](const Eigen::VectorXd&) { return Eigen::MatrixXd::Zero(1, 1).eval(); },
            [](const Eigen::VectorXd& y) { return (y.array() * y.array()).matrix().eval(); });
        SolveOptions opts;
        opts.two_grid_estimate = false;
        CHECK_THROWS_AS(solve_young(V, GridPath(1, 2.0, 10), v1(1.0), 1.0, opts),
                        NumericalError);
    }
}

TEST_CASE("solve_rde") {
    SUBCASE("lift of a piecewise-linear control matches the skeleton solve") {
        GridPath h = make_grid_path(2, 1.0, 10, [](double t) {
            Eigen::VectorXd v(2);
            v << std::sin(2.0 * t), std::cos(t) - 1.0;
            return v;
        });
        auto V = trig_fields(2, 2, 0.8, 1.3);
        Eigen::VectorXd a(2);
        a << 0.2, -0.1;
        SolveOptions fast;
        fast.two_grid_estimate = false;
        SolutionPath rde = solve_rde(V, lift_dyadic(h, 10, 2), a, 0.5, fast);
        // high-accuracy skeleton reference: Richardson on two Euler grids
        GridPath h14 = refine_to_level(h, 14);
        SolutionPath s14 = solve_skeleton(V, h14, a, 0.5, fast);
        SolutionPath s13 = solve_skeleton(V, restrict_to_level(h14, 13), a, 0.5, fast);
        Eigen::VectorXd ref = 2.0 * s14.states.values.row(1 << 14).transpose()
                            - s13.states.values.row(1 << 13).transpose();
        CHECK((rde.states.values.row(1 << 10).transpose() - ref).lpNorm<Eigen::Infinity>() < 1e-5);
    }
    SUBCASE("commuting linear fields against the matrix exponential") {
        std::vector<Eigen::MatrixXd> A(2);
        A[0] = (Eigen::MatrixXd(2, 2) << 0.0, 0.3, 0.3, 0.0).finished();
        A[1] = 0.2 * Eigen::MatrixXd::Identity(2, 2);
        std::vector<Eigen::VectorXd> b(2, Eigen::VectorXd::Zero(2));
        auto V = linear_fields(A, b, Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2));
        GridPath w = make_grid_path(2, 1.0, 10, [](double t) {
            Eigen::VectorXd v(2);
            v << std::sin(t), 0.5 * t - t * t / 3.0;
            return v;
        });
        Eigen::VectorXd a(2);
        a << 1.0, -1.0;
        SolveOptions fast;
        fast.two_grid_estimate = false;
        SolutionPath sol = solve_rde(V, lift_dyadic(w, 10, 2), a, 0.0, fast);
        Eigen::MatrixXd expo = A[0] * w.values(1 << 10, 0) + A[1] * w.values(1 << 10, 1);
        Eigen::VectorXd exact = expo.exp() * a;
        CHECK((sol.states.values.row(1 << 10).transpose() - exact).lpNorm<Eigen::Infinity>() < 1e-4);
    }
    SUBCASE("zero driver and zero drift stay constant") {
        auto V = trig_fields(2, 3, 0.5, 1.0);
        std::vector<GroupTensorD> blocks(16, GroupTensorD::identity(3, 2));
        RoughPathGrid zero(3, 2, 4, 1.0, std::move(blocks));
        Eigen::VectorXd a(2);
        a << 0.4, 0.6;
        SolutionPath sol = solve_rde(V, zero, a, 0.0);
        CHECK((sol.states.values.row(16).transpose() - a).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SUBCASE("degree-3 driver accepted, degree-1 rejected") {
        GridPath h = sine_driver(6);
        auto V = trig_fields(1, 1, 0.5, 1.0);
        CHECK_NOTHROW(solve_rde(V, lift_dyadic(h, 6, 3), v1(0.0), 0.3));
        CHECK_THROWS_AS(solve_rde(V, lift_dyadic(h, 6, 1), v1(0.0), 0.3), std::invalid_argument);
    }
    SUBCASE("drift by pairing agrees with the explicit Euler route on smooth data") {
        GridPath h = sine_driver(10);
        auto V = trig_fields(1, 1, 0.7, 1.1);
        SolveOptions fast;
        fast.two_grid_estimate = false;
        SolutionPath paired = solve_rde(V, lift_dyadic(h, 10, 2), v1(0.1), 0.9, fast);
        SolutionPath euler = solve_young(V, h, v1(0.1), 0.9, fast);
        CHECK((paired.states.values.row(1 << 10) - euler.states.values.row(1 << 10))
                  .lpNorm<Eigen::Infinity>() < 1e-3);
    }
}

TEST_CASE("solver invariants") {
    SUBCASE("flow property on grids") {
        CovarianceModel m(Eigen::VectorXd::Constant(2, 0.45), 1.0);
        GridPath w = FbmSampler(m, 8).sample(62, 0);
        auto V = trig_fields(2, 2, 0.6, 1.0);
        Eigen::VectorXd a(2);
        a << 0.0, 0.3;
        SolveOptions fast;
        fast.two_grid_estimate = false;
        RoughPathGrid X = lift_dyadic(w, 8, 2);
        SolutionPath whole = solve_rde(V, X, a, 0.0, fast);
        const int mid = 128;
        SolutionPath first = solve_rde(V, X.sub_range(0, mid), a, 0.0, fast);
        Eigen::VectorXd ymid = first.states.values.row(mid).transpose();
        SolutionPath second = solve_rde(V, X.sub_range(mid, 256), ymid, 0.0, fast);
        CHECK((second.states.values.row(128) - whole.states.values.row(256))
                  .lpNorm<Eigen::Infinity>() < 1e-12);
    }
    SUBCASE("scaled equation equals dilated driver") {
        CovarianceModel m(Eigen::VectorXd::Constant(1, 0.5), 1.0);
        GridPath w = FbmSampler(m, 7).sample(63, 0);
        auto V = trig_fields(1, 1, 0.8, 1.0);
        const double eps = 0.37;
        RoughPathGrid X = lift_dyadic(w, 7, 2);
        std::vector<GroupTensorD> blocks;
        for (int i = 0; i < X.intervals(); ++i) blocks.push_back(dilation(X.increment(i), eps));
        RoughPathGrid Xeps(1, 2, 7, 1.0, std::move(blocks));
        RoughPathGrid direct = lift_dyadic(scale_path(w, eps), 7, 2);
        SolveOptions fast;
        fast.two_grid_estimate = false;
        SolutionPath via_dilation = solve_rde(V, Xeps, v1(0.2), 0.8, fast);
        SolutionPath via_path = solve_rde(V, direct, v1(0.2), 0.8, fast);
        CHECK((via_dilation.states.values - via_path.states.values).lpNorm<Eigen::Infinity>()
              < 1e-12);
    }
    SUBCASE("rde on lifts converges to the skeleton solve with order >= 1") {
        GridPath h = make_grid_path(2, 1.0, 12, [](double t) {
            Eigen::VectorXd v(2);
            v << std::sin(2.0 * t), std::cos(3.0 * t) - 1.0;
            return v;
        });
        auto V = trig_fields(2, 2, 0.7, 1.0);
        Eigen::VectorXd a = Eigen::VectorXd::Zero(2);
        SolveOptions fast;
        fast.two_grid_estimate = false;
        GridPath h15 = refine_to_level(h, 15);
        SolutionPath ref_fine = solve_skeleton(V, h15, a, 0.4, fast);
        SolutionPath ref_half = solve_skeleton(V, restrict_to_level(h15, 14), a, 0.4, fast);
        Eigen::VectorXd ref = 2.0 * ref_fine.states.values.row(1 << 15).transpose()
                            - ref_half.states.values.row(1 << 14).transpose();
        std::vector<double> logh, logerr;
        for (int L = 8; L <= 11; ++L) {
            SolutionPath sol = solve_rde(V, lift_dyadic(h, L, 2), a, 0.4, fast);
            double err = (sol.states.values.row(1 << L).transpose() - ref).lpNorm<Eigen::Infinity>();
            logh.push_back(-L * std::log(2.0));
            logerr.push_back(std::log(err));
        }
        LinearFit f = linear_fit(logh, logerr);
        CHECK(f.slope >= 1.0);
    }
}

TEST_CASE("ellipticity_check") {
    SUBCASE("identity fields") {
        auto V = identity_fields(3);
        EllipticityReport rep = ellipticity_check(V, Eigen::VectorXd::Zero(3));
        CHECK(rep.rank == 3);
        CHECK(rep.sigma_min == doctest::Approx(1.0));
        CHECK(rep.elliptic);
    }
    SUBCASE("parallel fields are degenerate") {
        std::vector<Eigen::MatrixXd> A(2, Eigen::MatrixXd::Zero(2, 2));
        std::vector<Eigen::VectorXd> b(2, Eigen::VectorXd::Constant(2, 1.0));
        auto V = linear_fields(A, b, Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2));
        EllipticityReport rep = ellipticity_check(V, Eigen::VectorXd::Zero(2));
        CHECK(rep.rank == 1);
        CHECK_FALSE(rep.elliptic);
    }
    SUBCASE("gram invertibility iff full rank") {
        GaussianStream g(64);
        for (int rep = 0; rep < 10; ++rep) {
            Eigen::MatrixXd M = Eigen::MatrixXd::NullaryExpr(2, 3, [&g](int, int) { return g(); });
            std::vector<Eigen::MatrixXd> A(3, Eigen::MatrixXd::Zero(2, 2));
            std::vector<Eigen::VectorXd> b{M.col(0), M.col(1), M.col(2)};
            auto V = linear_fields(A, b, Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2));
            EllipticityReport r = ellipticity_check(V, Eigen::VectorXd::Zero(2));
            double det = (M * M.transpose()).determinant();
            CHECK((r.rank == 2) == (std::abs(det) > 1e-12));
        }
    }
}

TEST_CASE("control_from_path") {
    SUBCASE("identity fields recover the increment") {
        auto V = identity_fields(2);
        GridPath phi = make_grid_path(2, 1.0, 7, [](double t) {
            Eigen::VectorXd v(2);
            v << t * t, std::sin(t);
            return v;
        });
        GridPath h = control_from_path(V, phi, 0.31);
        for (int i = 0; i <= 128; ++i) {
            Eigen::VectorXd expect = (phi.values.row(i) - phi.values.row(0)).transpose();
            CHECK((h.values.row(i).transpose() - expect).lpNorm<Eigen::Infinity>() < 2e-4);
        }
    }
    SUBCASE("drift flow needs no control") {
        auto V = trig_fields(1, 1, 0.5, 0.8);
        // phi = flow of beta0 V_0 from a
        SolveOptions fast;
        fast.two_grid_estimate = false;
        GridPath zero(1, 1.0, 10);
        SolutionPath flow = solve_young(V, zero, v1(0.2), 1.3, fast);
        GridPath h = control_from_path(V, flow.states, 1.3);
        CHECK(h.values.lpNorm<Eigen::Infinity>() < 1e-4);
    }
    SUBCASE("round trip through the skeleton solve") {
        auto V = trig_fields(2, 2, 0.6, 0.9);
        GridPath phi = make_grid_path(2, 1.0, 12, [](double t) {
            Eigen::VectorXd v(2);
            v << 0.5 * std::sin(2 * t) + 0.1 * t, 0.3 * (1 - std::cos(t));
            return v;
        });
        GridPath h = control_from_path(V, phi, 0.5);
        SolveOptions fast;
        fast.two_grid_estimate = false;
        SolutionPath back = solve_skeleton(V, h, phi.values.row(0).transpose(), 0.5, fast);
        CHECK((back.states.values - phi.values).lpNorm<Eigen::Infinity>() < 1e-3);
    }
    SUBCASE("ellipticity failure carries the first failing time") {
        std::vector<Eigen::MatrixXd> A(1, Eigen::MatrixXd::Zero(2, 2));
        std::vector<Eigen::VectorXd> b(1, Eigen::VectorXd::Constant(2, 1.0));
        auto V = linear_fields(A, b, Eigen::MatrixXd::Zero(2, 2), Eigen::VectorXd::Zero(2));
        GridPath phi(2, 1.0, 4);
        for (int i = 0; i <= 16; ++i) phi.values(i, 0) = i / 16.0;
        CHECK_THROWS_AS(control_from_path(V, phi, 0.0), NumericalError);
    }
}
