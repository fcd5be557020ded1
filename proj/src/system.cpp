#include "mbph/system.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mbph/errors.hpp"

namespace mbph {

namespace {

constexpr double kMatrixTol = 1e-12;

bool is_finite(const Mat& m) { return m.allFinite(); }

} // namespace

PHSystem PHSystem::from_matrices(Mat J0, Mat J1, Mat Q) {
    const auto n = Q.rows();
    if (n < 1 || Q.cols() != n || J0.rows() != n || J0.cols() != n || J1.rows() != n ||
        J1.cols() != n)
        throw ParameterError("J0, J1 and Q must all be square with the same dimension");
    if (!is_finite(J0) || !is_finite(J1) || !is_finite(Q))
        throw ParameterError("system matrices contain non-finite entries");

    const double scale = std::max({1.0, J0.norm(), J1.norm(), Q.norm()});
    if ((J0 + J0.transpose()).norm() > kMatrixTol * scale)
        throw ParameterError("J0 must be skew-symmetric");
    if ((J1 - J1.transpose()).norm() > kMatrixTol * scale)
        throw ParameterError("J1 must be symmetric");
    if ((Q - Q.transpose()).norm() > kMatrixTol * scale)
        throw ParameterError("Q must be symmetric");

    Eigen::SelfAdjointEigenSolver<Mat> eig(Q);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw ParameterError("Q must be positive definite");

    Eigen::FullPivLU<Mat> lu(J1);
    lu.setThreshold(kMatrixTol);
    if (lu.rank() != n) {
        std::ostringstream os;
        os << "J1 has rank " << lu.rank() << " < " << n
           << "; only full-rank J1 (M = I, S1 = -J1/2) is supported";
        throw ParameterError(os.str());
    }

    PHSystem sys;
    sys.J0 = std::move(J0);
    sys.J1 = std::move(J1);
    sys.Q = std::move(Q);
    sys.M = Mat::Identity(n, n);
    sys.S1 = -0.5 * sys.J1;
    sys.Qinv = sys.Q.inverse();
    return sys;
}

PHSystem tl_system(double inductance, double capacitance) {
    if (!(inductance > 0.0) || !(capacitance > 0.0) || !std::isfinite(inductance) ||
        !std::isfinite(capacitance))
        throw ParameterError("transmission line needs L > 0 and C > 0");
    Mat J1(2, 2);
    J1 << 0.0, -1.0, -1.0, 0.0;
    Mat Q = Mat::Zero(2, 2);
    Q(0, 0) = 1.0 / capacitance;
    Q(1, 1) = 1.0 / inductance;
    return PHSystem::from_matrices(Mat::Zero(2, 2), std::move(J1), std::move(Q));
}

// ---------------------------------------------------------------------------
// Field

Field Field::closed_form(int dim, Fn value, Fn derivative, double lo, double hi,
                         std::vector<double> breakpoints) {
    if (!(lo < hi)) throw DomainError("field interval must satisfy lo < hi");
    Field f;
    f.dim_ = dim;
    f.lo_ = lo;
    f.hi_ = hi;
    f.value_ = std::move(value);
    f.derivative_ = std::move(derivative);
    f.breaks_ = std::move(breakpoints);
    return f;
}

Field Field::value_only(int dim, Fn value, double lo, double hi, std::vector<double> breakpoints) {
    return closed_form(dim, std::move(value), nullptr, lo, hi, std::move(breakpoints));
}

Field Field::sampled(std::vector<double> nodes, Mat values) {
    if (nodes.size() < 2 || static_cast<Eigen::Index>(nodes.size()) != values.cols())
        throw DomainError("sampled field needs >= 2 nodes and one column per node");
    if (!std::is_sorted(nodes.begin(), nodes.end()) ||
        std::adjacent_find(nodes.begin(), nodes.end()) != nodes.end())
        throw DomainError("sampled field nodes must be strictly increasing");
    const double lo = nodes.front();
    const double hi = nodes.back();
    auto interp = [nodes, values](double s) -> Vec {
        auto it = std::upper_bound(nodes.begin(), nodes.end(), s);
        std::size_t k = it == nodes.begin() ? 0 : static_cast<std::size_t>(it - nodes.begin()) - 1;
        k = std::min(k, nodes.size() - 2);
        const double th = (s - nodes[k]) / (nodes[k + 1] - nodes[k]);
        return (1.0 - th) * values.col(static_cast<Eigen::Index>(k)) +
               th * values.col(static_cast<Eigen::Index>(k + 1));
    };
    std::vector<double> breaks(nodes.begin() + 1, nodes.end() - 1);
    return value_only(static_cast<int>(values.rows()), std::move(interp), lo, hi, std::move(breaks));
}

Field Field::polynomial(Mat coeffs, double lo, double hi) {
    const int dim = static_cast<int>(coeffs.rows());
    auto value = [coeffs](double s) -> Vec {
        Vec v = Vec::Zero(coeffs.rows());
        for (Eigen::Index k = coeffs.cols() - 1; k >= 0; --k) v = v * s + coeffs.col(k);
        return v;
    };
    auto deriv = [coeffs](double s) -> Vec {
        Vec v = Vec::Zero(coeffs.rows());
        for (Eigen::Index k = coeffs.cols() - 1; k >= 1; --k)
            v = v * s + static_cast<double>(k) * coeffs.col(k);
        return v;
    };
    return closed_form(dim, std::move(value), std::move(deriv), lo, hi);
}

Field Field::constant(const Vec& v, double lo, double hi) {
    const Eigen::Index n = v.size();
    return closed_form(
        static_cast<int>(n), [v](double) { return v; }, [n](double) -> Vec { return Vec::Zero(n); },
        lo, hi);
}

double Field::checked(double s) const {
    const double slack = 1e-12 * std::max(1.0, std::abs(hi_ - lo_));
    if (!(s >= lo_ - slack && s <= hi_ + slack)) {
        std::ostringstream os;
        os << "field evaluated at " << s << " outside [" << lo_ << ", " << hi_ << "]";
        throw DomainError(os.str());
    }
    return std::clamp(s, lo_, hi_);
}

Vec Field::operator()(double s) const { return value_(checked(s)); }

Vec Field::derivative(double s) const {
    if (!derivative_) throw RequiresClosedForm("field has no exact spatial derivative");
    return derivative_(checked(s));
}

Field Field::transformed(const Mat& m) const {
    Fn v = [m, f = value_](double s) -> Vec { return m * f(s); };
    Fn d = nullptr;
    if (derivative_) d = [m, f = derivative_](double s) -> Vec { return m * f(s); };
    return closed_form(static_cast<int>(m.rows()), std::move(v), std::move(d), lo_, hi_, breaks_);
}

Field Field::combined(double alpha, const Field& other, double beta) const {
    if (other.dim_ != dim_ || other.lo_ != lo_ || other.hi_ != hi_)
        throw DomainError("cannot combine fields on different intervals or dimensions");
    Fn v = [alpha, beta, f = value_, g = other.value_](double s) -> Vec {
        return alpha * f(s) + beta * g(s);
    };
    Fn d = nullptr;
    if (derivative_ && other.derivative_)
        d = [alpha, beta, f = derivative_, g = other.derivative_](double s) -> Vec {
            return alpha * f(s) + beta * g(s);
        };
    std::vector<double> breaks = breaks_;
    breaks.insert(breaks.end(), other.breaks_.begin(), other.breaks_.end());
    return closed_form(dim_, std::move(v), std::move(d), lo_, hi_, std::move(breaks));
}

// ---------------------------------------------------------------------------
// Coordinate transformation

Field push_forward(const Field& physical, const BoundsSample& bounds) {
    const double a = bounds.a;
    const double w = bounds.width();
    const double sw = std::sqrt(w);
    auto value = [physical, a, w, sw](double u) -> Vec { return sw * physical(a + w * u); };
    Field::Fn deriv = nullptr;
    if (physical.has_derivative())
        deriv = [physical, a, w, sw](double u) -> Vec { return sw * w * physical.derivative(a + w * u); };
    std::vector<double> breaks;
    for (double s : physical.breakpoints()) breaks.push_back((s - a) / w);
    return Field::closed_form(physical.dim(), std::move(value), std::move(deriv), 0.0, 1.0,
                              std::move(breaks));
}

Field pull_back(const Field& unit, const BoundsSample& bounds) {
    const double a = bounds.a;
    const double w = bounds.width();
    const double sw = std::sqrt(w);
    auto value = [unit, a, w, sw](double s) -> Vec { return unit((s - a) / w) / sw; };
    Field::Fn deriv = nullptr;
    if (unit.has_derivative())
        deriv = [unit, a, w, sw](double s) -> Vec { return unit.derivative((s - a) / w) / (sw * w); };
    std::vector<double> breaks;
    for (double u : unit.breakpoints()) breaks.push_back(a + w * u);
    return Field::closed_form(unit.dim(), std::move(value), std::move(deriv), bounds.a, bounds.b,
                              std::move(breaks));
}

// ---------------------------------------------------------------------------
// Energy

double hamiltonian(const PHSystem& sys, const Field& x, const QuadSpec& quad) {
    if (quad.order < 2) throw ParameterError("Hamiltonian quadrature order must be >= 2");
    const QuadPoints q = composite_points(x.lo(), x.hi(), quad, x.breakpoints());
    double sum = 0.0;
    for (std::size_t k = 0; k < q.x.size(); ++k) {
        const Vec v = x(q.x[k]);
        sum += q.w[k] * v.dot(sys.Q * v);
    }
    return 0.5 * sum;
}

double hamiltonian_hat(const PHSystem& sys, const Field& xhat, const QuadSpec& quad) {
    return hamiltonian(sys, xhat, quad);
}

Field effort_of(const PHSystem& sys, const Field& xhat) { return xhat.transformed(sys.Q); }

double inner_l2(const Field& f, const Field& g, const QuadSpec& quad) {
    std::vector<double> breaks = f.breakpoints();
    breaks.insert(breaks.end(), g.breakpoints().begin(), g.breakpoints().end());
    const double lo = std::max(f.lo(), g.lo());
    const double hi = std::min(f.hi(), g.hi());
    const QuadPoints q = composite_points(lo, hi, quad, breaks);
    double sum = 0.0;
    for (std::size_t k = 0; k < q.x.size(); ++k) sum += q.w[k] * f(q.x[k]).dot(g(q.x[k]));
    return sum;
}

} // namespace mbph
