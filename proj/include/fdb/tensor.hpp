// Truncated tensor algebra T^k(R^d) for k <= 3: group elements, segment
// signatures, dilation and the shuffle-relation residuals.
#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace fdb {

struct ShuffleResidual {
    double max_abs_level2 = 0.0;
    double max_abs_level3 = 0.0;
    double max() const { return std::max(max_abs_level2, max_abs_level3); }
};

// Group-like element (1, X^1, X^2, X^3) of the degree-k truncated tensor
// algebra. level2 is d x d, level3 is d x d^2 with (p,q,r) stored at
// (p, q*d + r). Degrees 4 and above are rejected.
template <typename Scalar>
struct GroupTensor {
    using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

    int dim = 0;
    int degree = 1;
    Vec level1;
    Mat level2;  // present iff degree >= 2
    Mat level3;  // present iff degree == 3

    GroupTensor() = default;
    GroupTensor(int d, int k) : dim(d), degree(k) {
        if (d < 1) throw std::invalid_argument("GroupTensor: dim must be positive");
        if (k < 1 || k > 3) throw std::invalid_argument("GroupTensor: degree must be in {1,2,3}");
        level1 = Vec::Zero(d);
        if (k >= 2) level2 = Mat::Zero(d, d);
        if (k >= 3) level3 = Mat::Zero(d, d * d);
    }

    static GroupTensor identity(int d, int k) { return GroupTensor(d, k); }

    Scalar& l3(int p, int q, int r) { return level3(p, q * dim + r); }
    Scalar l3(int p, int q, int r) const { return level3(p, q * dim + r); }

    bool finite() const {
        if (!level1.allFinite()) return false;
        if (degree >= 2 && !level2.allFinite()) return false;
        if (degree >= 3 && !level3.allFinite()) return false;
        return true;
    }

    double max_abs() const {
        double m = level1.template lpNorm<Eigen::Infinity>();
        if (degree >= 2) m = std::max(m, (double)level2.template lpNorm<Eigen::Infinity>());
        if (degree >= 3) m = std::max(m, (double)level3.template lpNorm<Eigen::Infinity>());
        return m;
    }
};

template <typename Scalar>
inline void check_compatible(const GroupTensor<Scalar>& a, const GroupTensor<Scalar>& b) {
    if (a.dim != b.dim || a.degree != b.degree)
        throw std::invalid_argument("GroupTensor: dimension/degree mismatch");
}

// Truncated product into a preallocated result (c must not alias a or b):
// c1 = a1+b1, c2 = a2+b2+a1(x)b1, c3 = a3+b3+a1(x)b2+a2(x)b1.
template <typename Scalar>
void tensor_mul_into(const GroupTensor<Scalar>& a, const GroupTensor<Scalar>& b,
                     GroupTensor<Scalar>& c) {
    const int d = a.dim;
    c.dim = d;
    c.degree = a.degree;
    c.level1 = a.level1 + b.level1;
    if (a.degree >= 2) {
        c.level2 = a.level2 + b.level2;
        c.level2.noalias() += a.level1 * b.level1.transpose();
    }
    if (a.degree >= 3) {
        c.level3 = a.level3 + b.level3;
        for (int p = 0; p < d; ++p) {
            // a1(x)b2 contributes a1(p) * b2(q,r); a2(x)b1 contributes a2(p,q) * b1(r)
            for (int q = 0; q < d; ++q)
                for (int r = 0; r < d; ++r)
                    c.level3(p, q * d + r) += a.level1(p) * b.level2(q, r)
                                            + a.level2(p, q) * b.level1(r);
        }
    }
}

template <typename Scalar>
GroupTensor<Scalar> tensor_mul(const GroupTensor<Scalar>& a, const GroupTensor<Scalar>& b) {
    check_compatible(a, b);
    GroupTensor<Scalar> c(a.dim, a.degree);
    tensor_mul_into(a, b, c);
    return c;
}

// Group inverse of (1, g1, g2, g3): closed form from the Neumann series of
// (1 + N)^{-1} with N the positive-degree part.
template <typename Scalar>
GroupTensor<Scalar> tensor_inverse(const GroupTensor<Scalar>& g) {
    const int d = g.dim;
    GroupTensor<Scalar> h(d, g.degree);
    h.level1 = -g.level1;
    if (g.degree >= 2) h.level2 = -g.level2 + g.level1 * g.level1.transpose();
    if (g.degree >= 3) {
        h.level3 = -g.level3;
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q)
                for (int r = 0; r < d; ++r)
                    h.level3(p, q * d + r) += g.level1(p) * g.level2(q, r)
                                            + g.level2(p, q) * g.level1(r)
                                            - g.level1(p) * g.level1(q) * g.level1(r);
    }
    return h;
}

// exp of a straight segment: (1, v, v(x)v/2, v(x)v(x)v/6).
template <typename Scalar>
GroupTensor<Scalar> segment_signature(const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& increment,
                                      int degree) {
    const int d = (int)increment.size();
    GroupTensor<Scalar> g(d, degree);
    g.level1 = increment;
    if (degree >= 2) g.level2 = increment * increment.transpose() / Scalar(2);
    if (degree >= 3)
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q)
                for (int r = 0; r < d; ++r)
                    g.level3(p, q * d + r) = increment(p) * increment(q) * increment(r) / Scalar(6);
    return g;
}

// Dilation: level i scaled by delta^i.
template <typename Scalar>
GroupTensor<Scalar> dilation(const GroupTensor<Scalar>& x, Scalar delta) {
    GroupTensor<Scalar> y = x;
    y.level1 *= delta;
    if (x.degree >= 2) y.level2 *= delta * delta;
    if (x.degree >= 3) y.level3 *= delta * delta * delta;
    return y;
}

// Residuals of X1p X1q = X2pq + X2qp and (degree 3)
// X1p X2qr = X3pqr + X3qpr + X3qrp.
template <typename Scalar>
ShuffleResidual shuffle_check(const GroupTensor<Scalar>& g) {
    ShuffleResidual res;
    if (g.degree < 2) return res;
    const int d = g.dim;
    for (int p = 0; p < d; ++p)
        for (int q = 0; q < d; ++q) {
            double defect = std::abs((double)(g.level1(p) * g.level1(q)
                                              - g.level2(p, q) - g.level2(q, p)));
            res.max_abs_level2 = std::max(res.max_abs_level2, defect);
        }
    if (g.degree >= 3) {
        for (int p = 0; p < d; ++p)
            for (int q = 0; q < d; ++q)
                for (int r = 0; r < d; ++r) {
                    double defect = std::abs((double)(g.level1(p) * g.level2(q, r)
                                                      - g.level3(p, q * d + r)
                                                      - g.level3(q, p * d + r)
                                                      - g.level3(q, r * d + p)));
                    res.max_abs_level3 = std::max(res.max_abs_level3, defect);
                }
    }
    return res;
}

template <typename Scalar>
double tensor_max_abs_diff(const GroupTensor<Scalar>& a, const GroupTensor<Scalar>& b) {
    check_compatible(a, b);
    double m = (a.level1 - b.level1).template lpNorm<Eigen::Infinity>();
    if (a.degree >= 2) m = std::max(m, (double)(a.level2 - b.level2).template lpNorm<Eigen::Infinity>());
    if (a.degree >= 3) m = std::max(m, (double)(a.level3 - b.level3).template lpNorm<Eigen::Infinity>());
    return m;
}

using GroupTensorD = GroupTensor<double>;

}  // namespace fdb
