// Coefficient vector fields V_0..V_d with first/second derivatives (analytic
// when supplied, central finite differences otherwise) and the named
// built-in systems used by the experiment configs.
#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

namespace fdb {

class VectorFieldSystem {
public:
    using Vec = Eigen::VectorXd;
    using Mat = Eigen::MatrixXd;

    // diffusion(y) returns the e x d matrix [V_1(y)|...|V_d(y)].
    using DiffusionFn = std::function<Mat(const Vec&)>;
    using DriftFn = std::function<Vec(const Vec&)>;
    // jacobian(y, j): e x e Jacobian of V_j (j = 0 refers to V_0).
    using JacobianFn = std::function<Mat(const Vec&, int)>;
    // hessian(y, j, c): e x e Hessian of component c of V_j.
    using HessianFn = std::function<Mat(const Vec&, int, int)>;

    VectorFieldSystem(int state_dim, int driver_dim, DiffusionFn V, DriftFn V0,
                      JacobianFn dV = nullptr, HessianFn d2V = nullptr,
                      double fd_step = 1e-5);

    int state_dim() const { return e_; }
    int driver_dim() const { return d_; }
    bool analytic_gradients() const { return (bool)dV_; }

    Mat diffusion(const Vec& y) const { return V_(y); }
    Vec drift(const Vec& y) const { return V0_(y); }
    Vec field(const Vec& y, int j) const;  // j = 0 is the drift field

    Mat jacobian(const Vec& y, int j) const;           // analytic or central FD
    Mat hessian(const Vec& y, int j, int c) const;     // analytic or central FD

    // Directional-derivative vs finite-difference consistency at random
    // states; throws if the relative mismatch exceeds 1e-4. Run at
    // construction whenever analytic derivatives are supplied.
    void check_derivative_consistency(unsigned seed = 7, int n_states = 5) const;

private:
    int e_, d_;
    DiffusionFn V_;
    DriftFn V0_;
    JacobianFn dV_;
    HessianFn d2V_;
    double fd_step_;
};

// Named built-ins.
VectorFieldSystem identity_fields(int e, Eigen::VectorXd drift = Eigen::VectorXd());
VectorFieldSystem linear_fields(const std::vector<Eigen::MatrixXd>& A,
                                const std::vector<Eigen::VectorXd>& b,
                                const Eigen::MatrixXd& A0, const Eigen::VectorXd& b0);
// Bounded trigonometric test fields with bounded derivatives of all orders.
VectorFieldSystem trig_fields(int e, int d, double amplitude = 1.0, double frequency = 1.0);
// Quadratic polynomial fields: component c of V_j is
// const[j][c] + lin[j].row(c) . y + y^T quad[j][c] y.
VectorFieldSystem polynomial_fields(const std::vector<Eigen::VectorXd>& constant,
                                    const std::vector<Eigen::MatrixXd>& linear,
                                    const std::vector<std::vector<Eigen::MatrixXd>>& quadratic);

}  // namespace fdb
