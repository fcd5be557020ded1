#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mbph/discretization.hpp"

namespace mbph {

/// Travelling-wave reference on the transmission line.
struct TLState {
    double V = 0.0;
    double I = 0.0;
    double q = 0.0;
    double phi = 0.0;
};

/// V = sin(max(0, t - s/c)), I = V / Z with c = 1/sqrt(LC) and Z = sqrt(L/C).
/// For L = C = 1 this is V = I = sin(max(0, t - s)).
TLState analytic_tl(double t, double s, double inductance = 1.0, double capacitance = 1.0);

/// Reference solutions the simulator can be driven and scored against.
enum class Solution {
    PaperWave,   ///< sin(max(0, t - s/c)); switched on at t = 0
    SmoothWave,  ///< sin(t - s/c) without the cut-off
};

std::string to_string(Solution s);
Solution solution_from_string(const std::string& name);

TLState reference_tl(Solution sol, double t, double s, double inductance, double capacitance);

/// x_hat(t, .) of the reference pushed onto the unit interval, with a
/// breakpoint at the wavefront s = c t while it lies inside (a, b).
StateHistory analytic_state_history(const BoundaryTrajectory& traj, Solution sol,
                                    double inductance = 1.0, double capacitance = 1.0);

/// One classical Runge-Kutta step. `rhs(t, x)` returns dx/dt.
template <class State, class Rhs>
State rk4_step(const Rhs& rhs, const State& x, double t, double dt) {
    const State k1 = rhs(t, x);
    const State k2 = rhs(t + 0.5 * dt, State(x + (0.5 * dt) * k1));
    const State k3 = rhs(t + 0.5 * dt, State(x + (0.5 * dt) * k2));
    const State k4 = rhs(t + dt, State(x + dt * k3));
    return State(x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

struct SimConfig {
    double inductance = 1.0;
    double capacitance = 1.0;
    BoundaryTrajectory trajectory = BoundaryTrajectory::paper_benchmark();
    Solution solution = Solution::PaperWave;
    int n_elements = 10;
    std::optional<double> dt;  ///< default: cfl_fraction * max_stable_dt
    double cfl_fraction = 0.5;
    double t_end = 15.0;
    QuadSpec quad{8, 1};       ///< per-element rule for the initial projection
    double output_interval = 0.01;  ///< 0 writes every step
    std::uint64_t seed = 0;
};

double wave_speed(const SimConfig& cfg);

/// Largest accepted step:
///   min(w_min / (N^2 c), 0.5 w_min / (N c)).
/// The N^2 factor comes from the one-sided nodal reconstruction, whose
/// spectral radius grows like N^2 c / w.
double max_stable_dt(const SimConfig& cfg);
double default_dt(const SimConfig& cfg);
/// Throws ParameterError / CflViolation / AssumptionViolation.
void validate(const SimConfig& cfg);

struct SimRecord {
    BoundsSample bounds;
    DiscreteState x;
    NodalEfforts e;
    double H = 0.0;
    PowerAudit audit;
    double max_err = 0.0;
};

struct SimSummary {
    long steps = 0;
    long rows = 0;
    double dt = 0.0;
    double t_last = 0.0;
    double max_error = 0.0;
    /// Residuals split by whether the boundaries were moving at the row.
    double max_residual_moving = 0.0;
    double max_residual_static = 0.0;
    double max_relative_residual_static = 0.0;  ///< residual / max(|dH_dt|, 1)
    double max_scale = 0.0;
    double H_min = 0.0;
    double H_max = 0.0;
};

using RecordSink = std::function<void(const SimRecord&)>;

/// Integrates the benchmark with RK4. Steps are aligned to every kink of the
/// trajectory; a stage sitting on a kink uses the one-sided velocity of the
/// segment being integrated. Throws NonFiniteState with the last good time.
SimSummary simulate(const SimConfig& cfg, const RecordSink& sink = {});

/// Boundary data and right-hand side used by `simulate`.
class BenchmarkModel {
public:
    explicit BenchmarkModel(const SimConfig& cfg);

    const PHSystem& system() const { return sys_; }
    const Mesh& mesh() const { return mesh_; }
    BoundaryValues boundary_values(const BoundsSample& bounds) const;
    NodalEfforts efforts(const BoundsSample& bounds, const DiscreteState& x) const;
    DiscreteState rhs(const BoundsSample& bounds, const DiscreteState& x) const;
    DiscreteState initial_state() const;
    SimRecord record(const BoundsSample& bounds, const DiscreteState& x) const;

private:
    SimConfig cfg_;
    PHSystem sys_;
    Mesh mesh_;
};

/// Largest |V_sim - V_true| over element midpoints mapped to [a, b].
double error_field(const SimRecord& rec, Solution sol, double inductance, double capacitance);

struct ConvergenceRow {
    int n_elements = 0;
    double dt = 0.0;
    double max_error = 0.0;
    double power_residual_peak = 0.0;
};

/// One simulation per N, run concurrently. With no dt in `cfg` each member
/// uses its own default; otherwise dt is scaled by (N_0 / N)^2 from the first.
std::vector<ConvergenceRow> convergence_study(const SimConfig& cfg, const std::vector<int>& n_list);

/// Least-squares slope of -log(error) against log(N).
double observed_order(const std::vector<ConvergenceRow>& rows);

} // namespace mbph
