#include "fdb/vector_fields.hpp"

#include "fdb/sampling.hpp"

#include <memory>

#include <cmath>
#include <stdexcept>

namespace fdb {

VectorFieldSystem::VectorFieldSystem(int state_dim, int driver_dim, DiffusionFn V, DriftFn V0,
                                     JacobianFn dV, HessianFn d2V, double fd_step)
    : e_(state_dim), d_(driver_dim), V_(std::move(V)), V0_(std::move(V0)),
      dV_(std::move(dV)), d2V_(std::move(d2V)), fd_step_(fd_step) {
    if (e_ < 1 || d_ < 1) throw std::invalid_argument("VectorFieldSystem: bad dimensions");
    if (!V_ || !V0_) throw std::invalid_argument("VectorFieldSystem: missing evaluators");
    if (dV_) check_derivative_consistency();
}

Eigen::VectorXd VectorFieldSystem::field(const Vec& y, int j) const {
    if (j == 0) return V0_(y);
    return V_(y).col(j - 1);
}

Eigen::MatrixXd VectorFieldSystem::jacobian(const Vec& y, int j) const {
    if (dV_) return dV_(y, j);
    double h = fd_step_ * std::max(1.0, y.norm());
    Mat jac(e_, e_);
    Vec yp = y, ym = y;
    for (int c = 0; c < e_; ++c) {
        yp(c) += h;
        ym(c) -= h;
        jac.col(c) = (field(yp, j) - field(ym, j)) / (2.0 * h);
        yp(c) = y(c);
        ym(c) = y(c);
    }
    return jac;
}

Eigen::MatrixXd VectorFieldSystem::hessian(const Vec& y, int j, int c) const {
    if (d2V_) return d2V_(y, j, c);
    double h = fd_step_ * std::max(1.0, y.norm());
    Mat hess(e_, e_);
    Vec q = y;
    double f0 = field(y, j)(c);
    for (int a = 0; a < e_; ++a) {
        for (int b = a; b < e_; ++b) {
            double v;
            if (a == b) {
                q(a) = y(a) + h;
                double fp = field(q, j)(c);
                q(a) = y(a) - h;
                double fm = field(q, j)(c);
                q(a) = y(a);
                v = (fp - 2.0 * f0 + fm) / (h * h);
            } else {
                q(a) = y(a) + h; q(b) = y(b) + h;
                double fpp = field(q, j)(c);
                q(b) = y(b) - h;
                double fpm = field(q, j)(c);
                q(a) = y(a) - h; q(b) = y(b) + h;
                double fmp = field(q, j)(c);
                q(b) = y(b) - h;
                double fmm = field(q, j)(c);
                q(a) = y(a); q(b) = y(b);
                v = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
            }
            hess(a, b) = hess(b, a) = v;
        }
    }
    return hess;
}

void VectorFieldSystem::check_derivative_consistency(unsigned seed, int n_states) const {
    GaussianStream g(seed);
    for (int s = 0; s < n_states; ++s) {
        Vec y = g.vector(e_);
        Vec dir = g.vector(e_);
        dir /= dir.norm();
        double h = 1e-5 * std::max(1.0, y.norm());
        for (int j = 0; j <= d_; ++j) {
            Vec analytic = jacobian(y, j) * dir;
            Vec fd = (field(y + h * dir, j) - field(y - h * dir, j)) / (2.0 * h);
            double scale = std::max(1.0, fd.norm());
            if ((analytic - fd).norm() / scale > 1e-4)
                throw std::invalid_argument(
                    "VectorFieldSystem: analytic derivative of field " + std::to_string(j)
                    + " disagrees with finite differences");
        }
    }
}

VectorFieldSystem identity_fields(int e, Eigen::VectorXd drift) {
    if (drift.size() == 0) drift = Eigen::VectorXd::Zero(e);
    if (drift.size() != e) throw std::invalid_argument("identity_fields: drift size mismatch");
    auto V = [e](const Eigen::VectorXd&) { return Eigen::MatrixXd::Identity(e, e).eval(); };
    auto V0 = [drift](const Eigen::VectorXd&) { return drift; };
    auto dV = [e](const Eigen::VectorXd&, int) { return Eigen::MatrixXd::Zero(e, e).eval(); };
    auto d2V = [e](const Eigen::VectorXd&, int, int) { return Eigen::MatrixXd::Zero(e, e).eval(); };
    return VectorFieldSystem(e, e, V, V0, dV, d2V);
}

VectorFieldSystem linear_fields(const std::vector<Eigen::MatrixXd>& A,
                                const std::vector<Eigen::VectorXd>& b,
                                const Eigen::MatrixXd& A0, const Eigen::VectorXd& b0) {
    const int d = (int)A.size();
    if (d == 0 || b.size() != A.size()) throw std::invalid_argument("linear_fields: bad coefficients");
    const int e = (int)A[0].rows();
    auto V = [A, b, e, d](const Eigen::VectorXd& y) {
        Eigen::MatrixXd m(e, d);
        for (int j = 0; j < d; ++j) m.col(j) = A[j] * y + b[j];
        return m;
    };
    auto V0 = [A0, b0](const Eigen::VectorXd& y) { return (A0 * y + b0).eval(); };
    auto dV = [A, A0](const Eigen::VectorXd&, int j) { return j == 0 ? A0 : A[j - 1]; };
    auto d2V = [e](const Eigen::VectorXd&, int, int) { return Eigen::MatrixXd::Zero(e, e).eval(); };
    return VectorFieldSystem(e, d, V, V0, dV, d2V);
}

namespace {

// Deterministic phase/direction table for the trig built-in.
struct TrigTable {
    std::vector<Eigen::VectorXd> dir;   // (d+1)*e directions
    std::vector<double> phase;
    int e, d;
    TrigTable(int e_, int d_) : e(e_), d(d_) {
        GaussianStream g(derive_seed(1234577ULL, (std::uint64_t)e, (std::uint64_t)d));
        for (int j = 0; j <= d; ++j)
            for (int c = 0; c < e; ++c) {
                Eigen::VectorXd p = g.vector(e);
                p /= p.norm();
                dir.push_back(p);
                phase.push_back(g() * 1.5);
            }
    }
    const Eigen::VectorXd& p(int j, int c) const { return dir[(size_t)j * e + c]; }
    double ph(int j, int c) const { return phase[(size_t)j * e + c]; }
};

}  // namespace

VectorFieldSystem trig_fields(int e, int d, double amplitude, double frequency) {
    auto table = std::make_shared<TrigTable>(e, d);
    const double a = amplitude, om = frequency;
    auto value = [table, a, om](const Eigen::VectorXd& y, int j, int c) {
        return a * std::sin(om * table->p(j, c).dot(y) + table->ph(j, c));
    };
    auto V = [table, value, e, d](const Eigen::VectorXd& y) {
        Eigen::MatrixXd m(e, d);
        for (int j = 1; j <= d; ++j)
            for (int c = 0; c < e; ++c) m(c, j - 1) = value(y, j, c);
        return m;
    };
    auto V0 = [table, value, e](const Eigen::VectorXd& y) {
        Eigen::VectorXd v(e);
        for (int c = 0; c < e; ++c) v(c) = value(y, 0, c);
        return v;
    };
    auto dV = [table, a, om, e](const Eigen::VectorXd& y, int j) {
        Eigen::MatrixXd jac(e, e);
        for (int c = 0; c < e; ++c) {
            double s = a * om * std::cos(om * table->p(j, c).dot(y) + table->ph(j, c));
            jac.row(c) = s * table->p(j, c).transpose();
        }
        return jac;
    };
    auto d2V = [table, a, om](const Eigen::VectorXd& y, int j, int c) {
        double s = -a * om * om * std::sin(om * table->p(j, c).dot(y) + table->ph(j, c));
        return (s * table->p(j, c) * table->p(j, c).transpose()).eval();
    };
    return VectorFieldSystem(e, d, V, V0, dV, d2V);
}

VectorFieldSystem polynomial_fields(const std::vector<Eigen::VectorXd>& constant,
                                    const std::vector<Eigen::MatrixXd>& linear,
                                    const std::vector<std::vector<Eigen::MatrixXd>>& quadratic) {
    const int nf = (int)constant.size();  // fields 0..d
    if (nf < 2 || linear.size() != constant.size() || quadratic.size() != constant.size())
        throw std::invalid_argument("polynomial_fields: coefficient lists must cover V_0..V_d");
    const int e = (int)constant[0].size();
    const int d = nf - 1;
    auto value = [constant, linear, quadratic](const Eigen::VectorXd& y, int j, int c) {
        return constant[j](c) + linear[j].row(c).dot(y)
             + y.dot(quadratic[j][c] * y);
    };
    auto V = [value, e, d](const Eigen::VectorXd& y) {
        Eigen::MatrixXd m(e, d);
        for (int j = 1; j <= d; ++j)
            for (int c = 0; c < e; ++c) m(c, j - 1) = value(y, j, c);
        return m;
    };
    auto V0 = [value, e](const Eigen::VectorXd& y) {
        Eigen::VectorXd v(e);
        for (int c = 0; c < e; ++c) v(c) = value(y, 0, c);
        return v;
    };
    auto dV = [linear, quadratic, e](const Eigen::VectorXd& y, int j) {
        Eigen::MatrixXd jac(e, e);
        for (int c = 0; c < e; ++c)
            jac.row(c) = linear[j].row(c)
                       + (y.transpose() * (quadratic[j][c] + quadratic[j][c].transpose()));
        return jac;
    };
    auto d2V = [quadratic](const Eigen::VectorXd&, int j, int c) {
        return (quadratic[j][c] + quadratic[j][c].transpose()).eval();
    };
    return VectorFieldSystem(e, d, V, V0, dV, d2V);
}

}  // namespace fdb
