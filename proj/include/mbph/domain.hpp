#pragma once

#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace mbph {

/// Tolerance applied to the sign check on the product of boundary velocities.
inline constexpr double kAssumptionTol = 1e-12;

/// Which one-sided derivative to report at a kink of a piecewise trajectory.
enum class Side { Left, Right };

class BoundaryTrajectory;

namespace traj {

struct Static {
    double a = 0.0;
    double b = 1.0;
};

/// a(t) = a0 + va t, b(t) = b0 + vb t.
struct Linear {
    double a0 = 0.0;
    double b0 = 1.0;
    double va = 0.0;
    double vb = 0.0;
};

/// The transmission-line benchmark segment
///   a(t) = 0.2 + 0.02 t,  b(t) = 0.5 - 0.1 cos(0.25 t)   for t <= 7.5,
/// frozen at its t = 7.5 position afterwards.
struct PaperBenchmark {
    static constexpr double t_freeze = 7.5;
};

/// Follows `inner` up to `t_freeze` and stays put afterwards.
struct PiecewiseFrozen {
    std::shared_ptr<const BoundaryTrajectory> inner;
    double t_freeze = 0.0;
};

} // namespace traj

/// Boundary positions and exact velocities at one instant.
struct BoundsSample {
    double t = 0.0;
    double a = 0.0;
    double b = 1.0;
    double da = 0.0;
    double db = 0.0;

    double width() const { return b - a; }
};

/// Analytic description of a moving interval [a(t), b(t)]. All families carry
/// closed-form derivatives; there is deliberately no way to build one from
/// tabulated data. Immutable and safe to share between threads.
class BoundaryTrajectory {
public:
    using Family = std::variant<traj::Static, traj::Linear, traj::PaperBenchmark,
                                traj::PiecewiseFrozen>;

    BoundaryTrajectory() : family_(traj::Static{}) {}
    BoundaryTrajectory(Family f); // NOLINT(google-explicit-constructor)

    static BoundaryTrajectory static_domain(double a, double b) { return {traj::Static{a, b}}; }
    static BoundaryTrajectory linear(double a0, double b0, double va, double vb) {
        return {traj::Linear{a0, b0, va, vb}};
    }
    static BoundaryTrajectory paper_benchmark() { return {traj::PaperBenchmark{}}; }
    static BoundaryTrajectory frozen(BoundaryTrajectory inner, double t_freeze);

    const Family& family() const { return family_; }
    std::string name() const;

    /// Times at which the velocity jumps. The integrator aligns steps to them.
    std::vector<double> kinks() const;

private:
    Family family_;
};

/// Raw evaluation without the Assumption checks.
BoundsSample sample_bounds(const BoundaryTrajectory& traj, double t, Side side = Side::Right);

/// Evaluates positions and velocities, then checks a < b and
/// da * db >= -kAssumptionTol. Throws AssumptionViolation otherwise.
BoundsSample eval_bounds(const BoundaryTrajectory& traj, double t, Side side = Side::Right);

/// Throws AssumptionViolation if the sample breaks ordering or direction.
void check_assumption(const BoundsSample& s);

/// Checks the assumption on `n` uniformly spaced points of [t0, t1] and
/// on both one-sided limits at every kink inside the interval.
void validate_trajectory(const BoundaryTrajectory& traj, double t0, double t1, int n = 2001);

/// Smallest width b - a over the same grid `validate_trajectory` uses.
double min_width(const BoundaryTrajectory& traj, double t0, double t1, int n = 2001);

// Chart h(t, u) = a + (b - a) u from the unit interval onto [a, b].
double chart(const BoundsSample& s, double u);
double chart(const BoundaryTrajectory& traj, double t, double u);
double chart_velocity(const BoundsSample& s, double u);
double chart_velocity(const BoundaryTrajectory& traj, double t, double u);
double inverse_chart(const BoundsSample& s, double x);
double inverse_chart(const BoundaryTrajectory& traj, double t, double x);

} // namespace mbph
