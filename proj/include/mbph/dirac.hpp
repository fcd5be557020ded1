#pragma once

#include <complex>
#include <cstdint>
#include <functional>

#include "mbph/system.hpp"

namespace mbph {

using Complex = std::complex<double>;
using CVec = Eigen::VectorXcd;

/// Principal square root of a real number: sqrt(z) for z >= 0, i sqrt(|z|)
/// otherwise.
struct ComplexRoot {
    Complex value;

    explicit ComplexRoot(double z)
        : value(z >= 0.0 ? Complex(std::sqrt(z), 0.0) : Complex(0.0, std::sqrt(-z))) {}
    Complex conj() const { return std::conj(value); }
};

/// Boundary port pair. The first r entries of each half belong to the
/// internal (Stokes) block, the last n entries to the boundary-motion block.
struct PortVector {
    CVec flow;
    CVec effort;
    int r = 0;
    int n = 0;

    auto internal_flow() const { return flow.head(r); }
    auto internal_effort() const { return effort.head(r); }
    auto motion_flow() const { return flow.tail(n); }
    auto motion_effort() const { return effort.tail(n); }

    /// flow^H effort: the power entering through the boundary.
    Complex power() const { return flow.dot(effort); }
};

/// Flow field of the moving-boundary system for a given effort field:
///   f = J0 e + J1 e' / w - (wdot / 2w) Q^{-1} e + d/du (alpha Q^{-1} e),
/// with w = b - a, wdot = db - da, alpha(u) = (da + wdot u) / w.
/// Throws RequiresClosedForm if `effort` has no exact derivative.
Field flow_of_effort(const PHSystem& sys, const BoundsSample& bounds, const Field& effort);
Field flow_of_effort(const PHSystem& sys, const BoundaryTrajectory& traj, double t,
                     const Field& effort);

/// Boundary ports built from the effort traces at u = 0 and u = 1.
PortVector boundary_ports(const PHSystem& sys, const BoundsSample& bounds, const Vec& e0,
                          const Vec& e1);
PortVector boundary_ports(const PHSystem& sys, const BoundaryTrajectory& traj, double t,
                          const Vec& e0, const Vec& e1);

/// Empty builders fall back to boundary_ports.
using PortBuilder =
    std::function<PortVector(const PHSystem&, const BoundsSample&, const Vec&, const Vec&)>;

/// (f, f_port, e, e_port) tuple. Elements built through `make_dirac_element`
/// lie in the Dirac structure by construction.
struct DiracElement {
    Field flow;
    Field effort;
    PortVector ports;
};

DiracElement make_dirac_element(const PHSystem& sys, const BoundsSample& bounds,
                                const Field& effort, const PortBuilder& ports = {});

/// The four terms of the symmetric pairing
///   <f1, e2> + <f2, e1> - f1_port^H e2_port - f2_port^H e1_port.
struct PairingTerms {
    double l2_12 = 0.0;
    double l2_21 = 0.0;
    Complex port_12;
    Complex port_21;

    Complex value() const { return l2_12 + l2_21 - port_12 - port_21; }
    double scale() const;
};

PairingTerms pairing(const DiracElement& g1, const DiracElement& g2,
                     const QuadSpec& quad = kFieldQuad);

inline constexpr double kDiracTol = 1e-9;

struct DiracCheck {
    int n_samples = 100;
    int degree = 4;
    std::uint64_t seed = 0;
    QuadSpec quad{8, 8};
};

struct DiracReport {
    double t = 0.0;
    double max_abs_pairing = 0.0;
    double max_relative = 0.0;
    double max_scale = 0.0;
    int n_samples = 0;
    std::uint64_t seed = 0;
    bool pass = false;
};

/// Samples `n_samples` pairs of elements from random polynomial efforts
/// (coefficients uniform in [-1, 1]) and reports the largest pairing. A pair
/// passes when |pairing| <= kDiracTol * scale. Pairs are evaluated in parallel;
/// coefficients are drawn up front so the report does not depend on threads.
DiracReport verify_dirac(const PHSystem& sys, const BoundsSample& bounds, const DiracCheck& check,
                         const PortBuilder& ports = {});
DiracReport verify_dirac(const PHSystem& sys, const BoundaryTrajectory& traj, double t,
                         const DiracCheck& check, const PortBuilder& ports = {});
/// Single-threaded reference used to test the parallel path.
DiracReport verify_dirac_serial(const PHSystem& sys, const BoundsSample& bounds,
                                const DiracCheck& check, const PortBuilder& ports = {});

/// Random polynomial effort fields used by `verify_dirac`, in draw order.
std::vector<Field> random_polynomial_efforts(int dim, int count, int degree, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Balance laws

/// Time-dependent state x_hat(t, .) on the unit interval.
using StateHistory = std::function<Field(double t)>;

/// Central difference step used by the residual checks: 1e-5 max(1, |t|).
double default_fd_step(double t);

/// Central-difference time derivative of a state history at t.
Field time_derivative(const StateHistory& state, double t, double h);

/// Boundary side of the moving-domain power balance:
///   -[e^T M^T S1 M e / w]_0^1 + [alpha e^T x / 2]_0^1,  e = Q x.
double power_balance_rhs(const PHSystem& sys, const BoundsSample& bounds, const Vec& x0,
                         const Vec& x1);

/// Transmission-line form of the same balance, scaled by the width w:
///   V0 I0 - V1 I1 + db (q1^2/2C + phi1^2/2L) - da (q0^2/2C + phi0^2/2L).
double tl_power_balance_rhs(double inductance, double capacitance, const BoundsSample& bounds,
                            const Vec& x0, const Vec& x1);

struct PowerBalance {
    double lhs = 0.0;  ///< int_0^1 e^T dx/dt
    double rhs = 0.0;  ///< boundary power
    double residual = 0.0;
};

/// Compares the distributed power against the boundary power for a state
/// and its time derivative.
PowerBalance power_balance_residual(const PHSystem& sys, const BoundsSample& bounds,
                                    const Field& xhat, const Field& dxhat_dt,
                                    const QuadSpec& quad = kFieldQuad);

struct ConservationCheck {
    double total = 0.0;     ///< int_a^b x_k ds at t
    double d_total = 0.0;   ///< finite-difference rate of change
    double boundary = 0.0;  ///< flux through the moving boundaries
    double residual = 0.0;
};

/// Checks d/dt int sqrt(w) x_k du against
///   [alpha sqrt(w) x_k + (J1 e)_k / sqrt(w)]_0^1 + sqrt(w) int (J0 e)_k du.
/// For the transmission line, component 0 is total charge and component 1
/// total flux.
ConservationCheck conserved_quantity_residual(const PHSystem& sys, const BoundaryTrajectory& traj,
                                              double t, const StateHistory& state, int component,
                                              double fd_step, const QuadSpec& quad = kFieldQuad);
ConservationCheck charge_conservation_residual(const PHSystem& sys, const BoundaryTrajectory& traj,
                                               double t, const StateHistory& state, double fd_step,
                                               const QuadSpec& quad = kFieldQuad);
ConservationCheck flux_conservation_residual(const PHSystem& sys, const BoundaryTrajectory& traj,
                                             double t, const StateHistory& state, double fd_step,
                                             const QuadSpec& quad = kFieldQuad);

} // namespace mbph
