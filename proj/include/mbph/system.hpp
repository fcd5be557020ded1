#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "mbph/domain.hpp"
#include "mbph/quadrature.hpp"

namespace mbph {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Linear first-order boundary port-Hamiltonian system with Hamiltonian
/// operator J0 + J1 d/ds and energy density x^T Q x / 2. Only full-rank J1 is
/// supported, for which the port matrices are M = I and S1 = -J1 / 2.
struct PHSystem {
    Mat J0;
    Mat J1;
    Mat Q;
    Mat M;
    Mat S1;
    Mat Qinv;

    int n() const { return static_cast<int>(Q.rows()); }
    int r() const { return static_cast<int>(M.rows()); }

    /// Validates the matrices and derives M, S1 and Q^{-1}.
    /// Throws ParameterError on any violated invariant.
    static PHSystem from_matrices(Mat J0, Mat J1, Mat Q);
};

/// Lossless transmission line with state (q, phi) and efforts (V, I) = Q x,
/// Q = diag(1/C, 1/L), J0 = 0, J1 = [[0, -1], [-1, 0]].
PHSystem tl_system(double inductance, double capacitance);

/// A vector-valued function on an interval, optionally with an exact first
/// derivative. Breakpoints mark kinks; quadrature splits panels there.
class Field {
public:
    using Fn = std::function<Vec(double)>;

    Field() = default;

    static Field closed_form(int dim, Fn value, Fn derivative, double lo = 0.0, double hi = 1.0,
                             std::vector<double> breakpoints = {});
    /// Value only; derivative queries throw RequiresClosedForm.
    static Field value_only(int dim, Fn value, double lo = 0.0, double hi = 1.0,
                            std::vector<double> breakpoints = {});
    /// Piecewise-linear interpolant of nodal samples (columns of `values`).
    static Field sampled(std::vector<double> nodes, Mat values);
    /// Polynomial on [lo, hi]; row k holds the monomial coefficients of
    /// component k in increasing degree.
    static Field polynomial(Mat coeffs, double lo = 0.0, double hi = 1.0);
    static Field constant(const Vec& v, double lo = 0.0, double hi = 1.0);

    int dim() const { return dim_; }
    double lo() const { return lo_; }
    double hi() const { return hi_; }
    bool has_derivative() const { return static_cast<bool>(derivative_); }
    const std::vector<double>& breakpoints() const { return breaks_; }

    /// Throws DomainError outside [lo, hi] (with a 1e-12 relative slack).
    Vec operator()(double s) const;
    Vec derivative(double s) const;

    /// Pointwise M * f, keeping the derivative when present.
    Field transformed(const Mat& m) const;
    /// alpha * this + beta * other on the same interval.
    Field combined(double alpha, const Field& other, double beta) const;

private:
    int dim_ = 0;
    double lo_ = 0.0;
    double hi_ = 1.0;
    Fn value_;
    Fn derivative_;
    std::vector<double> breaks_;

    double checked(double s) const;
};

/// x_hat(u) = sqrt(b - a) x(a + (b - a) u). `physical` must live on [a, b].
Field push_forward(const Field& physical, const BoundsSample& bounds);
/// x(s) = x_hat((s - a)/(b - a)) / sqrt(b - a).
Field pull_back(const Field& unit, const BoundsSample& bounds);

/// 0.5 * int_0^1 x_hat^T Q x_hat by composite Gauss-Legendre.
double hamiltonian_hat(const PHSystem& sys, const Field& xhat, const QuadSpec& quad = kFieldQuad);
/// 0.5 * int_lo^hi x^T Q x for a field in physical coordinates.
double hamiltonian(const PHSystem& sys, const Field& x, const QuadSpec& quad = kFieldQuad);

/// e_hat = Q x_hat pointwise.
Field effort_of(const PHSystem& sys, const Field& xhat);

/// L2 inner product of two fields over their common interval.
double inner_l2(const Field& f, const Field& g, const QuadSpec& quad = kFieldQuad);

} // namespace mbph
