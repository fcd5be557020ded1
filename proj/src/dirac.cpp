#include "mbph/dirac.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "mbph/errors.hpp"

namespace mbph {

Field flow_of_effort(const PHSystem& sys, const BoundsSample& bounds, const Field& effort) {
    if (!effort.has_derivative())
        throw RequiresClosedForm("flow_of_effort needs an effort field with an exact derivative");
    const double w = bounds.width();
    const double rate = (bounds.db - bounds.da) / w;
    const double da = bounds.da;
    const double ddelta = bounds.db - bounds.da;
    // d/du(alpha Q^{-1} e) = rate Q^{-1} e + alpha Q^{-1} e', which combines
    // with the compression term into +rate/2 Q^{-1} e.
    auto value = [sys, effort, w, rate, da, ddelta](double u) -> Vec {
        const Vec e = effort(u);
        const Vec de = effort.derivative(u);
        const double alpha = (da + ddelta * u) / w;
        return sys.J0 * e + (sys.J1 * de) / w + 0.5 * rate * (sys.Qinv * e) +
               alpha * (sys.Qinv * de);
    };
    return Field::value_only(effort.dim(), std::move(value), 0.0, 1.0, effort.breakpoints());
}

Field flow_of_effort(const PHSystem& sys, const BoundaryTrajectory& traj, double t,
                     const Field& effort) {
    return flow_of_effort(sys, eval_bounds(traj, t), effort);
}

PortVector boundary_ports(const PHSystem& sys, const BoundsSample& bounds, const Vec& e0,
                          const Vec& e1) {
    check_assumption(bounds);
    const int n = sys.n();
    const int r = sys.r();
    const double inv_sw = 1.0 / std::sqrt(bounds.width());
    const ComplexRoot ra(bounds.da);
    const ComplexRoot rb(bounds.db);

    PortVector p;
    p.r = r;
    p.n = n;
    p.flow.resize(r + n);
    p.effort.resize(r + n);
    p.flow.head(r) = (sys.S1 * sys.M * (e0 - e1) * inv_sw).cast<Complex>();
    p.effort.head(r) = (sys.M * (e0 + e1) * inv_sw).cast<Complex>();
    p.flow.tail(n) = (-ra.conj() * e0.cast<Complex>() + rb.conj() * e1.cast<Complex>()) * inv_sw;
    p.effort.tail(n) = 0.5 * sys.Qinv.cast<Complex>() *
                       (ra.value * e0.cast<Complex>() + rb.value * e1.cast<Complex>()) * inv_sw;
    return p;
}

PortVector boundary_ports(const PHSystem& sys, const BoundaryTrajectory& traj, double t,
                          const Vec& e0, const Vec& e1) {
    return boundary_ports(sys, eval_bounds(traj, t), e0, e1);
}

DiracElement make_dirac_element(const PHSystem& sys, const BoundsSample& bounds,
                                const Field& effort, const PortBuilder& ports) {
    DiracElement g;
    g.flow = flow_of_effort(sys, bounds, effort);
    g.effort = effort;
    g.ports = ports ? ports(sys, bounds, effort(0.0), effort(1.0))
                    : boundary_ports(sys, bounds, effort(0.0), effort(1.0));
    return g;
}

double PairingTerms::scale() const {
    return std::max({std::abs(l2_12), std::abs(l2_21), std::abs(port_12), std::abs(port_21)});
}

PairingTerms pairing(const DiracElement& g1, const DiracElement& g2, const QuadSpec& quad) {
    PairingTerms p;
    p.l2_12 = inner_l2(g1.flow, g2.effort, quad);
    p.l2_21 = inner_l2(g2.flow, g1.effort, quad);
    p.port_12 = g1.ports.flow.dot(g2.ports.effort);
    p.port_21 = g2.ports.flow.dot(g1.ports.effort);
    return p;
}

// ---------------------------------------------------------------------------
// Isotropy sampling

std::vector<Field> random_polynomial_efforts(int dim, int count, int degree, std::uint64_t seed) {
    if (degree < 0) throw ParameterError("polynomial degree must be >= 0");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    std::vector<Field> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        Mat c(dim, degree + 1);
        for (Eigen::Index j = 0; j < c.cols(); ++j)
            for (Eigen::Index i = 0; i < c.rows(); ++i) c(i, j) = coef(rng);
        out.push_back(Field::polynomial(std::move(c)));
    }
    return out;
}

namespace {

void check_quadrature_exactness(const DiracCheck& check) {
    if (check.n_samples < 1) throw ParameterError("verify_dirac needs n_samples >= 1");
    // The integrands f^T e have degree 2 * degree.
    if (2 * check.degree > GaussLegendre(check.quad.order).exact_degree())
        throw ParameterError("polynomial degree exceeds the exactness of the quadrature rule");
}

struct PairResult {
    double abs = 0.0;
    double scale = 0.0;
};

PairResult evaluate_pair(const PHSystem& sys, const BoundsSample& bounds, const Field& e1,
                         const Field& e2, const QuadSpec& quad, const PortBuilder& ports) {
    const DiracElement g1 = make_dirac_element(sys, bounds, e1, ports);
    const DiracElement g2 = make_dirac_element(sys, bounds, e2, ports);
    const PairingTerms p = pairing(g1, g2, quad);
    return {std::abs(p.value()), p.scale()};
}

DiracReport summarize(const BoundsSample& bounds, const DiracCheck& check,
                      const std::vector<PairResult>& results) {
    DiracReport rep;
    rep.t = bounds.t;
    rep.n_samples = check.n_samples;
    rep.seed = check.seed;
    rep.pass = true;
    for (const PairResult& r : results) {
        rep.max_abs_pairing = std::max(rep.max_abs_pairing, r.abs);
        rep.max_scale = std::max(rep.max_scale, r.scale);
        const double rel = r.scale > 0.0 ? r.abs / r.scale : r.abs;
        rep.max_relative = std::max(rep.max_relative, rel);
        if (!(r.abs <= kDiracTol * r.scale)) rep.pass = false;
    }
    return rep;
}

} // namespace

DiracReport verify_dirac(const PHSystem& sys, const BoundsSample& bounds, const DiracCheck& check,
                         const PortBuilder& ports) {
    check_quadrature_exactness(check);
    const std::vector<Field> efforts =
        random_polynomial_efforts(sys.n(), 2 * check.n_samples, check.degree, check.seed);
    std::vector<PairResult> results(check.n_samples);
#pragma omp parallel for schedule(static)
    for (int k = 0; k < check.n_samples; ++k)
        results[k] = evaluate_pair(sys, bounds, efforts[2 * k], efforts[2 * k + 1], check.quad, ports);
    return summarize(bounds, check, results);
}

DiracReport verify_dirac_serial(const PHSystem& sys, const BoundsSample& bounds,
                                const DiracCheck& check, const PortBuilder& ports) {
    check_quadrature_exactness(check);
    const std::vector<Field> efforts =
        random_polynomial_efforts(sys.n(), 2 * check.n_samples, check.degree, check.seed);
    std::vector<PairResult> results(check.n_samples);
    for (int k = 0; k < check.n_samples; ++k)
        results[k] = evaluate_pair(sys, bounds, efforts[2 * k], efforts[2 * k + 1], check.quad, ports);
    return summarize(bounds, check, results);
}

DiracReport verify_dirac(const PHSystem& sys, const BoundaryTrajectory& traj, double t,
                         const DiracCheck& check, const PortBuilder& ports) {
    return verify_dirac(sys, eval_bounds(traj, t), check, ports);
}

// ---------------------------------------------------------------------------
// Balance laws

double default_fd_step(double t) { return 1e-5 * std::max(1.0, std::abs(t)); }

Field time_derivative(const StateHistory& state, double t, double h) {
    if (!(h > 0.0)) throw ParameterError("finite-difference step must be positive");
    const Field plus = state(t + h);
    const Field minus = state(t - h);
    return plus.combined(0.5 / h, minus, -0.5 / h);
}

double power_balance_rhs(const PHSystem& sys, const BoundsSample& bounds, const Vec& x0,
                         const Vec& x1) {
    const double w = bounds.width();
    const Vec e0 = sys.Q * x0;
    const Vec e1 = sys.Q * x1;
    const Mat K = sys.M.transpose() * sys.S1 * sys.M;
    const double stokes = -(e1.dot(K * e1) - e0.dot(K * e0)) / w;
    const double motion = 0.5 * (bounds.db * e1.dot(x1) - bounds.da * e0.dot(x0)) / w;
    return stokes + motion;
}

double tl_power_balance_rhs(double inductance, double capacitance, const BoundsSample& bounds,
                            const Vec& x0, const Vec& x1) {
    const double L = inductance;
    const double C = capacitance;
    const double V0 = x0(0) / C, I0 = x0(1) / L;
    const double V1 = x1(0) / C, I1 = x1(1) / L;
    const double dens0 = x0(0) * x0(0) / (2.0 * C) + x0(1) * x0(1) / (2.0 * L);
    const double dens1 = x1(0) * x1(0) / (2.0 * C) + x1(1) * x1(1) / (2.0 * L);
    return V0 * I0 + bounds.db * dens1 - V1 * I1 - bounds.da * dens0;
}

PowerBalance power_balance_residual(const PHSystem& sys, const BoundsSample& bounds,
                                    const Field& xhat, const Field& dxhat_dt,
                                    const QuadSpec& quad) {
    PowerBalance pb;
    pb.lhs = inner_l2(effort_of(sys, xhat), dxhat_dt, quad);
    pb.rhs = power_balance_rhs(sys, bounds, xhat(0.0), xhat(1.0));
    pb.residual = std::abs(pb.lhs - pb.rhs);
    return pb;
}

ConservationCheck conserved_quantity_residual(const PHSystem& sys, const BoundaryTrajectory& traj,
                                              double t, const StateHistory& state, int component,
                                              double fd_step, const QuadSpec& quad) {
    if (component < 0 || component >= sys.n())
        throw IndexError("conserved quantity component out of range");
    if (!(fd_step > 0.0)) throw ParameterError("finite-difference step must be positive");

    auto total_at = [&](double tt) {
        const BoundsSample bs = eval_bounds(traj, tt);
        const Field x = state(tt);
        const double sw = std::sqrt(bs.width());
        return integrate([&](double u) { return sw * x(u)(component); }, 0.0, 1.0, quad,
                         x.breakpoints());
    };

    const BoundsSample bs = eval_bounds(traj, t);
    const double w = bs.width();
    const double sw = std::sqrt(w);
    const Field x = state(t);
    const Vec x0 = x(0.0), x1 = x(1.0);
    const Vec Je0 = sys.J1 * (sys.Q * x0);
    const Vec Je1 = sys.J1 * (sys.Q * x1);

    ConservationCheck c;
    c.total = total_at(t);
    c.d_total = (total_at(t + fd_step) - total_at(t - fd_step)) / (2.0 * fd_step);
    c.boundary = (bs.db / w) * sw * x1(component) + Je1(component) / sw -
                 (bs.da / w) * sw * x0(component) - Je0(component) / sw;
    if (!sys.J0.isZero(0.0)) {
        const Mat J0Q = sys.J0 * sys.Q;
        c.boundary += sw * integrate([&](double u) { return (J0Q * x(u))(component); }, 0.0, 1.0,
                                     quad, x.breakpoints());
    }
    c.residual = std::abs(c.d_total - c.boundary);
    return c;
}

namespace {

void require_tl_shape(const PHSystem& sys) {
    if (sys.n() != 2)
        throw UnsupportedClosure("charge/flux conservation checks need a two-component system");
}

} // namespace

ConservationCheck charge_conservation_residual(const PHSystem& sys, const BoundaryTrajectory& traj,
                                               double t, const StateHistory& state, double fd_step,
                                               const QuadSpec& quad) {
    require_tl_shape(sys);
    return conserved_quantity_residual(sys, traj, t, state, 0, fd_step, quad);
}

ConservationCheck flux_conservation_residual(const PHSystem& sys, const BoundaryTrajectory& traj,
                                             double t, const StateHistory& state, double fd_step,
                                             const QuadSpec& quad) {
    require_tl_shape(sys);
    return conserved_quantity_residual(sys, traj, t, state, 1, fd_step, quad);
}

} // namespace mbph
