#include "mbph/domain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mbph/errors.hpp"

namespace mbph {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Unfrozen benchmark ramp.
BoundsSample benchmark_ramp(double t) {
    BoundsSample s;
    s.t = t;
    s.a = 0.2 + 0.02 * t;
    s.b = 0.5 - 0.1 * std::cos(0.25 * t);
    s.da = 0.02;
    s.db = 0.025 * std::sin(0.25 * t);
    return s;
}

BoundsSample frozen_at(BoundsSample s, double t) {
    s.t = t;
    s.da = 0.0;
    s.db = 0.0;
    return s;
}

// Right-sided convention: exactly at t_freeze the boundaries are already static.
bool use_frozen(double t, double t_freeze, Side side) {
    return side == Side::Right ? t >= t_freeze : t > t_freeze;
}

} // namespace

BoundaryTrajectory::BoundaryTrajectory(Family f) : family_(std::move(f)) {
    if (const auto* pf = std::get_if<traj::PiecewiseFrozen>(&family_)) {
        if (!pf->inner) throw ParameterError("piecewise_frozen trajectory needs an inner trajectory");
        if (!std::isfinite(pf->t_freeze)) throw ParameterError("t_freeze must be finite");
    }
    if (const auto* st = std::get_if<traj::Static>(&family_)) {
        if (!(st->a < st->b)) throw AssumptionViolation("static domain requires a < b");
    }
}

BoundaryTrajectory BoundaryTrajectory::frozen(BoundaryTrajectory inner, double t_freeze) {
    return {traj::PiecewiseFrozen{std::make_shared<const BoundaryTrajectory>(std::move(inner)),
                                  t_freeze}};
}

std::string BoundaryTrajectory::name() const {
    return std::visit(overloaded{[](const traj::Static&) { return std::string("static"); },
                                 [](const traj::Linear&) { return std::string("linear"); },
                                 [](const traj::PaperBenchmark&) {
                                     return std::string("paper_benchmark");
                                 },
                                 [](const traj::PiecewiseFrozen&) {
                                     return std::string("piecewise_frozen");
                                 }},
                      family_);
}

std::vector<double> BoundaryTrajectory::kinks() const {
    return std::visit(
        overloaded{[](const traj::Static&) { return std::vector<double>{}; },
                   [](const traj::Linear&) { return std::vector<double>{}; },
                   [](const traj::PaperBenchmark&) {
                       return std::vector<double>{traj::PaperBenchmark::t_freeze};
                   },
                   [](const traj::PiecewiseFrozen& pf) {
                       std::vector<double> k;
                       for (double t : pf.inner->kinks())
                           if (t < pf.t_freeze) k.push_back(t);
                       k.push_back(pf.t_freeze);
                       return k;
                   }},
        family_);
}

BoundsSample sample_bounds(const BoundaryTrajectory& traj, double t, Side side) {
    if (!std::isfinite(t)) throw DomainError("trajectory queried at non-finite time");
    return std::visit(
        overloaded{[&](const traj::Static& st) {
                       return BoundsSample{t, st.a, st.b, 0.0, 0.0};
                   },
                   [&](const traj::Linear& ln) {
                       return BoundsSample{t, ln.a0 + ln.va * t, ln.b0 + ln.vb * t, ln.va, ln.vb};
                   },
                   [&](const traj::PaperBenchmark&) {
                       constexpr double tf = traj::PaperBenchmark::t_freeze;
                       if (use_frozen(t, tf, side)) return frozen_at(benchmark_ramp(tf), t);
                       return benchmark_ramp(t);
                   },
                   [&](const traj::PiecewiseFrozen& pf) {
                       if (use_frozen(t, pf.t_freeze, side))
                           return frozen_at(sample_bounds(*pf.inner, pf.t_freeze, Side::Left), t);
                       return sample_bounds(*pf.inner, t, side);
                   }},
        traj.family());
}

void check_assumption(const BoundsSample& s) {
    if (!(s.a < s.b)) {
        std::ostringstream os;
        os << "boundaries out of order at t=" << s.t << ": a=" << s.a << " >= b=" << s.b;
        throw AssumptionViolation(os.str());
    }
    if (s.da * s.db < -kAssumptionTol) {
        std::ostringstream os;
        os << "boundaries move in opposite directions at t=" << s.t << ": da=" << s.da
           << ", db=" << s.db;
        throw AssumptionViolation(os.str());
    }
}

BoundsSample eval_bounds(const BoundaryTrajectory& traj, double t, Side side) {
    BoundsSample s = sample_bounds(traj, t, side);
    check_assumption(s);
    return s;
}

namespace {

template <class Fn>
void for_each_grid_sample(const BoundaryTrajectory& traj, double t0, double t1, int n, Fn&& fn) {
    if (n < 2) n = 2;
    for (int k = 0; k < n; ++k) {
        const double t = t0 + (t1 - t0) * static_cast<double>(k) / (n - 1);
        fn(sample_bounds(traj, t, Side::Right));
    }
    for (double tk : traj.kinks()) {
        if (tk < t0 || tk > t1) continue;
        fn(sample_bounds(traj, tk, Side::Left));
        fn(sample_bounds(traj, tk, Side::Right));
    }
}

} // namespace

void validate_trajectory(const BoundaryTrajectory& traj, double t0, double t1, int n) {
    for_each_grid_sample(traj, t0, t1, n, [](const BoundsSample& s) { check_assumption(s); });
}

double min_width(const BoundaryTrajectory& traj, double t0, double t1, int n) {
    double w = std::numeric_limits<double>::infinity();
    for_each_grid_sample(traj, t0, t1, n,
                         [&](const BoundsSample& s) { w = std::min(w, s.width()); });
    return w;
}

namespace {

void require_unit(double u) {
    if (!(u >= 0.0 && u <= 1.0)) {
        std::ostringstream os;
        os << "unit coordinate " << u << " outside [0, 1]";
        throw DomainError(os.str());
    }
}

} // namespace

double chart(const BoundsSample& s, double u) {
    require_unit(u);
    return s.a + (s.b - s.a) * u;
}

double chart(const BoundaryTrajectory& traj, double t, double u) {
    return chart(eval_bounds(traj, t), u);
}

double chart_velocity(const BoundsSample& s, double u) {
    require_unit(u);
    return s.da + (s.db - s.da) * u;
}

double chart_velocity(const BoundaryTrajectory& traj, double t, double u) {
    return chart_velocity(eval_bounds(traj, t), u);
}

double inverse_chart(const BoundsSample& s, double x) {
    if (!(x >= s.a && x <= s.b)) {
        std::ostringstream os;
        os << "position " << x << " outside [" << s.a << ", " << s.b << "]";
        throw DomainError(os.str());
    }
    return std::clamp((x - s.a) / (s.b - s.a), 0.0, 1.0);
}

double inverse_chart(const BoundaryTrajectory& traj, double t, double x) {
    return inverse_chart(eval_bounds(traj, t), x);
}

} // namespace mbph
