#pragma once

#include <functional>

#include "mbph/dirac.hpp"

namespace mbph {

/// Uniform static mesh of [0, 1] with N elements. Nodes and elements are
/// indexed from zero: node i sits at u_i = i / N, element i spans
/// [u_i, u_{i+1}]. Its image under the chart is the moving physical mesh.
class Mesh {
public:
    explicit Mesh(int elements);

    int elements() const { return N_; }
    int nodes() const { return N_ + 1; }
    double node(int i) const;
    double spacing() const { return 1.0 / N_; }

private:
    int N_;
};

/// Piecewise-constant energy basis: N on the open element, N/2 on its
/// endpoints, 0 elsewhere.
double basis_omega_elem(const Mesh& mesh, int i, double u);
/// Nodal hat function with basis_omega_node(i, u_j) = delta_ij.
double basis_omega_node(const Mesh& mesh, int i, double u);

/// Element-integrated energy variables, element-major: entry i*n + k is
/// component k of element i.
struct DiscreteState {
    int n = 0;
    int N = 0;
    Vec data;

    DiscreteState() = default;
    DiscreteState(int dim, int elements) : n(dim), N(elements), data(Vec::Zero(dim * elements)) {}
    auto element(int i) { return data.segment(i * n, n); }
    auto element(int i) const { return data.segment(i * n, n); }
};

/// Nodal efforts, node-major with N+1 nodes.
struct NodalEfforts {
    int n = 0;
    int N = 0;
    Vec data;

    NodalEfforts() = default;
    NodalEfforts(int dim, int elements)
        : n(dim), N(elements), data(Vec::Zero(dim * (elements + 1))) {}
    auto node(int i) { return data.segment(i * n, n); }
    auto node(int i) const { return data.segment(i * n, n); }
};

/// One effort component imposed at each end of the unit interval.
struct BoundaryValues {
    int left_component = 0;
    double left = 0.0;
    int right_component = 1;
    double right = 0.0;
};

struct BoundaryConditions {
    int left_component = 0;
    std::function<double(const BoundsSample&)> left;
    int right_component = 1;
    std::function<double(const BoundsSample&)> right;

    BoundaryValues at(const BoundsSample& bounds) const {
        return {left_component, left ? left(bounds) : 0.0, right_component,
                right ? right(bounds) : 0.0};
    }
};

/// Recovers the N+1 nodal efforts from the N element states and the two
/// imposed boundary values. Each imposed component is propagated along the
/// mesh from its own end so that (e_i + e_{i+1})/2 = N Q x_i holds exactly.
/// Throws UnsupportedClosure unless n == 2 with distinct components imposed.
NodalEfforts reconstruct_nodal_efforts(const PHSystem& sys, const Mesh& mesh,
                                       const DiscreteState& x, const BoundaryValues& bc);

/// Time derivative of one element state:
///   -wdot/(2w) x_i - alpha_i Q^{-1} e_i + alpha_{i+1} Q^{-1} e_{i+1}
///   + J1 (e_{i+1} - e_i) / w + J0 (e_i + e_{i+1}) / (2N).
Vec element_rhs(const PHSystem& sys, const BoundsSample& bounds, const Mesh& mesh, int i,
                const Vec& x_elem, const Vec& e_i, const Vec& e_next);

/// All element derivatives at once. The parallel kernel splits elements
/// across OpenMP threads; the serial kernel is the reference it is tested
/// against. Both write into `dx`, which must already have the state's size.
void semi_discrete_rhs_serial(const PHSystem& sys, const BoundsSample& bounds, const Mesh& mesh,
                              const DiscreteState& x, const NodalEfforts& e, DiscreteState& dx);
void semi_discrete_rhs_parallel(const PHSystem& sys, const BoundsSample& bounds, const Mesh& mesh,
                                const DiscreteState& x, const NodalEfforts& e, DiscreteState& dx);

/// Element count from which the time loop switches to the parallel kernel.
inline constexpr int kParallelElementThreshold = 4096;

/// Per-element energies N x_i^T Q x_i / 2.
std::vector<double> element_hamiltonians(const PHSystem& sys, const Mesh& mesh,
                                         const DiscreteState& x);
double discrete_hamiltonian(const PHSystem& sys, const Mesh& mesh, const DiscreteState& x);

/// Ports of element i: the boundary ports with the chart velocities at
/// u_i and u_{i+1} in place of da and db. Identical to boundary_ports for N = 1.
PortVector discrete_element_ports(const PHSystem& sys, const BoundsSample& bounds,
                                  const Mesh& mesh, int i, const Vec& e_i, const Vec& e_next);

struct PowerAudit {
    double dH_dt = 0.0;
    double port_power = 0.0;       ///< real part of the summed element port power
    double port_power_imag = 0.0;
    double residual = 0.0;

    double scale() const { return std::max(std::abs(dH_dt), std::abs(port_power)); }
};

/// Compares the rate of change of the discrete Hamiltonian with the power
/// entering through the element ports.
PowerAudit discrete_power_audit(const PHSystem& sys, const BoundsSample& bounds, const Mesh& mesh,
                                const DiscreteState& x, const NodalEfforts& e,
                                const DiscreteState& f);

/// Element integrals of a field on [0, 1].
DiscreteState project_state(const Mesh& mesh, const Field& xhat, const QuadSpec& quad = {8, 1});
/// Piecewise-constant field N x_i on each element.
Field element_field(const Mesh& mesh, const DiscreteState& x);
/// Piecewise-linear field through the nodal efforts.
Field nodal_field(const Mesh& mesh, const NodalEfforts& e);

} // namespace mbph
