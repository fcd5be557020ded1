#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mbph/errors.hpp"
#include "mbph/timeloop.hpp"

using namespace mbph;
using doctest::Approx;

TEST_CASE("analytic transmission-line solution") {
    CHECK(analytic_tl(0.5, 1.0).V == 0.0);
    CHECK(analytic_tl(0.7, 0.7).V == 0.0);
    const TLState r = analytic_tl(2.0, 1.0);
    CHECK(r.V == Approx(std::sin(1.0)).epsilon(1e-15));
    CHECK(r.I == r.V);
    CHECK(r.q == r.V);
    CHECK(r.phi == r.I);
    const TLState g = analytic_tl(2.0, 0.3, 2.0, 0.5);
    CHECK(g.q == Approx(0.5 * g.V));
    CHECK(g.phi == Approx(2.0 * g.I));
}

TEST_CASE("analytic solution solves the telegrapher equations") {
    // q_t = -I_s, phi_t = -V_s behind the wavefront.
    const double L = 2.0, C = 0.5, h = 1e-5;
    for (auto [t, s] : {std::pair{2.0, 0.3}, std::pair{5.0, 0.45}}) {
        const auto at = [&](double tt, double ss) { return analytic_tl(tt, ss, L, C); };
        const double qt = (at(t + h, s).q - at(t - h, s).q) / (2 * h);
        const double Is = (at(t, s + h).I - at(t, s - h).I) / (2 * h);
        const double pt = (at(t + h, s).phi - at(t - h, s).phi) / (2 * h);
        const double Vs = (at(t, s + h).V - at(t, s - h).V) / (2 * h);
        CHECK(qt == Approx(-Is).epsilon(1e-8));
        CHECK(pt == Approx(-Vs).epsilon(1e-8));
    }
    CHECK(to_string(solution_from_string("smooth_wave")) == "smooth_wave");
    CHECK_THROWS_AS(solution_from_string("square"), ConfigError);
    CHECK(reference_tl(Solution::SmoothWave, 0.0, 0.5, 1, 1).V == Approx(std::sin(-0.5)));
}

TEST_CASE("rk4 examples") {
    auto zero = [](double, double) { return 0.0; };
    CHECK(rk4_step(zero, 3.5, 0.0, 0.1) == 3.5);
    auto decay = [](double, double x) { return -x; };
    CHECK(rk4_step(decay, 1.0, 0.0, 0.1) == Approx(std::exp(-0.1)).epsilon(1e-7));
    CHECK(std::abs(rk4_step(decay, 1.0, 0.0, 0.1) - 0.90483742) <= 1e-7);

    auto global_error = [&](int steps) {
        double x = 1.0;
        const double dt = 1.0 / steps;
        for (int k = 0; k < steps; ++k) x = rk4_step(decay, x, k * dt, dt);
        return std::abs(x - std::exp(-1.0));
    };
    const double ratio = global_error(10) / global_error(20);
    CHECK(ratio == Approx(16.0).epsilon(0.1));

    // Vector states and time-dependent right-hand sides.
    auto rot = [](double t, const Vec& x) -> Vec { return Vec::Constant(x.size(), std::cos(t)); };
    const Vec y = rk4_step(rot, Vec(Vec::Zero(2)), 0.0, 0.01);
    CHECK(y(0) == Approx(std::sin(0.01)).epsilon(1e-12));
}

TEST_CASE("config validation") {
    SimConfig cfg;
    cfg.dt = 1.0;
    CHECK_THROWS_AS(validate(cfg), CflViolation);
    cfg.dt = default_dt(cfg);
    CHECK_NOTHROW(validate(cfg));
    CHECK(default_dt(cfg) == Approx(0.5 * max_stable_dt(cfg)));
    // The stable step respects the classical bound 0.5 w / (N c) as well.
    const double w = min_width(cfg.trajectory, 0.0, cfg.t_end);
    CHECK(max_stable_dt(cfg) <= 0.5 * w / cfg.n_elements);
    cfg.n_elements = 1;
    CHECK(max_stable_dt(cfg) == Approx(0.5 * w));

    SimConfig bad;
    bad.n_elements = 0;
    CHECK_THROWS_AS(validate(bad), ParameterError);
    bad = SimConfig{};
    bad.t_end = -1.0;
    CHECK_THROWS_AS(validate(bad), ParameterError);
    bad = SimConfig{};
    bad.trajectory = BoundaryTrajectory::linear(0.2, 0.4, 0.1, -0.1);
    CHECK_THROWS_AS(simulate(bad), AssumptionViolation);
    bad = SimConfig{};
    bad.inductance = 0.0;
    CHECK_THROWS_AS(validate(bad), ParameterError);
}

TEST_CASE("zero data stays zero") {
    SimConfig cfg;
    cfg.trajectory = BoundaryTrajectory::static_domain(0.2, 0.4);
    cfg.t_end = 0.15;  // the wave has not reached s = 0.2 yet
    cfg.output_interval = 0.0;
    long rows = 0;
    const SimSummary s = simulate(cfg, [&](const SimRecord& r) {
        ++rows;
        CHECK(r.x.data.norm() == 0.0);
        CHECK(r.H == 0.0);
        CHECK(r.max_err == 0.0);
    });
    CHECK(rows == s.steps + 1);
    CHECK(s.H_max == 0.0);
}

TEST_CASE("benchmark run: causality, alignment, energy, determinism") {
    SimConfig cfg;
    cfg.t_end = 9.0;
    cfg.output_interval = 0.25;
    std::vector<SimRecord> rows;
    const SimSummary s = simulate(cfg, [&](const SimRecord& r) { rows.push_back(r); });
    CHECK(rows.front().bounds.t == 0.0);
    CHECK(rows.back().bounds.t == 9.0);
    CHECK(s.t_last == 9.0);
    bool saw_freeze = false;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const SimRecord& r = rows[k];
        if (k > 0) CHECK(r.bounds.t > rows[k - 1].bounds.t);
        CHECK(r.H >= 0.0);
        CHECK(r.H < 1.0);
        if (r.bounds.t < 0.2) CHECK(r.max_err == 0.0);
        if (r.bounds.t == 7.5) saw_freeze = true;
        if (r.bounds.t > 7.5) {
            CHECK(r.bounds.da == 0.0);
            CHECK(r.audit.residual <= 1e-10 * std::max(std::abs(r.audit.dH_dt), 1.0));
        }
    }
    CHECK(saw_freeze);
    CHECK(s.max_residual_moving > 1e-8 * s.max_scale);
    CHECK(s.max_error < 0.02);

    std::vector<SimRecord> again;
    simulate(cfg, [&](const SimRecord& r) { again.push_back(r); });
    REQUIRE(again.size() == rows.size());
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(again[k].x.data == rows[k].x.data);
        CHECK(again[k].audit.residual == rows[k].audit.residual);
    }
}

TEST_CASE("error field") {
    SimRecord rec;
    rec.bounds = {0.0, 0.2, 0.4, 0.02, 0.0};
    rec.x = DiscreteState(2, 4);
    CHECK(error_field(rec, Solution::PaperWave, 1.0, 1.0) == 0.0);
    // Exact element averages of a constant voltage reproduce it.
    rec.bounds.t = 5.0;
    const double sw = std::sqrt(0.2);
    for (int i = 0; i < 4; ++i) rec.x.element(i)(0) = sw * 0.25 * 1.0;  // V = 1 everywhere
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
        worst = std::max(worst, std::abs(1.0 - std::sin(5.0 - (0.2 + 0.2 * (i + 0.5) / 4))));
    CHECK(error_field(rec, Solution::PaperWave, 1.0, 1.0) == Approx(worst).epsilon(1e-14));
}

TEST_CASE("convergence study") {
    SimConfig cfg;
    const auto single = convergence_study(cfg, {10});
    REQUIRE(single.size() == 1);
    CHECK(single[0].n_elements == 10);

    const auto rows = convergence_study(cfg, {10, 20, 40});
    REQUIRE(rows.size() == 3);
    for (std::size_t k = 0; k + 1 < rows.size(); ++k)
        CHECK(rows[k + 1].max_error <= 1.1 * rows[k].max_error);
    CHECK(rows[2].max_error < rows[0].max_error);

    SimConfig smooth;
    smooth.trajectory = BoundaryTrajectory::static_domain(0.2, 0.4);
    smooth.solution = Solution::SmoothWave;
    smooth.t_end = 2.0;
    const auto srows = convergence_study(smooth, {10, 20, 40});
    CHECK(observed_order(srows) >= 0.9);

    CHECK_THROWS_AS(convergence_study(cfg, {20, 10}), ParameterError);
    CHECK_THROWS_AS(convergence_study(cfg, {}), ParameterError);

    // A fixed dt is rescaled with N^2 so every member stays stable.
    SimConfig fixed = cfg;
    fixed.t_end = 1.0;
    fixed.dt = 1e-3;
    const auto frows = convergence_study(fixed, {10, 20});
    CHECK(frows[1].dt == Approx(0.25e-3));
}

TEST_CASE("observed order of synthetic data") {
    std::vector<ConvergenceRow> rows{{10, 0, 1.0, 0}, {20, 0, 0.25, 0}, {40, 0, 0.0625, 0}};
    CHECK(observed_order(rows) == Approx(2.0));
}
