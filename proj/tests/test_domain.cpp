#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mbph/domain.hpp"
#include "mbph/errors.hpp"

using namespace mbph;
using doctest::Approx;

TEST_CASE("benchmark bounds at t = 0") {
    const BoundsSample s = eval_bounds(BoundaryTrajectory::paper_benchmark(), 0.0);
    CHECK(s.a == Approx(0.2).epsilon(1e-15));
    CHECK(s.b == Approx(0.4).epsilon(1e-15));
    CHECK(s.da == 0.02);
    CHECK(s.db == 0.0);
}

TEST_CASE("static domain is constant") {
    const auto tr = BoundaryTrajectory::static_domain(0.0, 1.0);
    for (double t : {0.0, 3.3, 100.0}) {
        const BoundsSample s = eval_bounds(tr, t);
        CHECK(s.a == 0.0);
        CHECK(s.b == 1.0);
        CHECK(s.da == 0.0);
        CHECK(s.db == 0.0);
    }
}

TEST_CASE("benchmark freezes at 7.5 with right-sided derivative") {
    const auto tr = BoundaryTrajectory::paper_benchmark();
    const BoundsSample right = eval_bounds(tr, 7.5);
    CHECK(right.da == 0.0);
    CHECK(right.db == 0.0);
    const BoundsSample left = eval_bounds(tr, 7.5, Side::Left);
    CHECK(left.da == 0.02);
    CHECK(left.db == Approx(0.025 * std::sin(0.25 * 7.5)));
    const BoundsSample later = eval_bounds(tr, 12.0);
    CHECK(later.a == Approx(0.35));
    CHECK(later.b == Approx(0.5 - 0.1 * std::cos(1.875)));
    CHECK(later.da == 0.0);
    CHECK(tr.kinks() == std::vector<double>{7.5});
}

TEST_CASE("piecewise frozen wraps any family") {
    const auto tr = BoundaryTrajectory::frozen(BoundaryTrajectory::linear(0.0, 1.0, 0.1, 0.2), 2.0);
    const BoundsSample s = eval_bounds(tr, 1.0);
    CHECK(s.a == Approx(0.1));
    CHECK(s.db == Approx(0.2));
    const BoundsSample f = eval_bounds(tr, 5.0);
    CHECK(f.a == Approx(0.2));
    CHECK(f.b == Approx(1.4));
    CHECK(f.da == 0.0);
    CHECK(tr.name() == "piecewise_frozen");
}

TEST_CASE("assumption violations") {
    CHECK_THROWS_AS(BoundaryTrajectory::static_domain(1.0, 0.5), AssumptionViolation);
    // Boundaries moving apart in opposite directions.
    const auto opposite = BoundaryTrajectory::linear(0.0, 1.0, -0.1, 0.1);
    CHECK_THROWS_AS(eval_bounds(opposite, 0.5), AssumptionViolation);
    CHECK_NOTHROW(sample_bounds(opposite, 0.5));
    // Crossing boundaries.
    const auto crossing = BoundaryTrajectory::linear(0.0, 1.0, 0.5, 0.1);
    CHECK_NOTHROW(eval_bounds(crossing, 1.0));
    CHECK_THROWS_AS(eval_bounds(crossing, 3.0), AssumptionViolation);
    CHECK_THROWS_AS(validate_trajectory(crossing, 0.0, 3.0), AssumptionViolation);
    CHECK_NOTHROW(validate_trajectory(BoundaryTrajectory::paper_benchmark(), 0.0, 15.0));
    // Both negative is allowed.
    CHECK_NOTHROW(eval_bounds(BoundaryTrajectory::linear(0.0, 1.0, -0.1, -0.2), 0.5));
}

TEST_CASE("chart examples") {
    const auto unit = BoundaryTrajectory::static_domain(0.0, 1.0);
    const auto narrow = BoundaryTrajectory::static_domain(0.2, 0.4);
    CHECK(chart(unit, 0.0, 0.5) == 0.5);
    CHECK(chart(BoundaryTrajectory::paper_benchmark(), 0.0, 0.0) == Approx(0.2));
    CHECK(chart(narrow, 0.0, 0.75) == Approx(0.35).epsilon(1e-15));
    CHECK(chart(narrow, 0.0, 1.0) == Approx(0.4));
    CHECK_THROWS_AS(chart(unit, 0.0, 1.5), DomainError);
    CHECK_THROWS_AS(chart(unit, 0.0, -0.1), DomainError);
}

TEST_CASE("chart velocity examples") {
    CHECK(chart_velocity(BoundaryTrajectory::static_domain(0.0, 1.0), 1.0, 0.3) == 0.0);
    const auto translate = BoundaryTrajectory::linear(0.0, 1.0, 0.02, 0.02);
    for (double u : {0.0, 0.4, 1.0}) CHECK(chart_velocity(translate, 1.0, u) == Approx(0.02));
    const auto stretch = BoundaryTrajectory::linear(0.0, 1.0, 0.0, 0.1);
    CHECK(chart_velocity(stretch, 0.0, 0.5) == Approx(0.05));
}

TEST_CASE("inverse chart examples and round trip") {
    const auto narrow = BoundaryTrajectory::static_domain(0.2, 0.4);
    CHECK(inverse_chart(BoundaryTrajectory::static_domain(0.0, 1.0), 0.0, 0.3) == Approx(0.3));
    CHECK(inverse_chart(narrow, 0.0, 0.4) == Approx(1.0));
    CHECK(inverse_chart(narrow, 0.0, 0.25) == Approx(0.25));
    CHECK_THROWS_AS(inverse_chart(narrow, 0.0, 0.5), DomainError);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto tr = BoundaryTrajectory::paper_benchmark();
    for (int k = 0; k < 1000; ++k) {
        const double t = 15.0 * U(rng);
        const BoundsSample s = eval_bounds(tr, t);
        const double x = s.a + (s.b - s.a) * U(rng);
        CHECK(std::abs(chart(s, inverse_chart(s, x)) - x) <= 1e-14 * std::abs(x));
    }
}

TEST_CASE("exact derivatives agree with central differences") {
    const std::vector<BoundaryTrajectory> families{
        BoundaryTrajectory::static_domain(0.1, 0.9), BoundaryTrajectory::linear(0.0, 1.0, 0.03, 0.07),
        BoundaryTrajectory::paper_benchmark(),
        BoundaryTrajectory::frozen(BoundaryTrajectory::linear(0.0, 1.0, -0.01, -0.02), 4.0)};
    const double h = 1e-6;
    for (const auto& tr : families) {
        for (double t = 0.1; t < 14.0; t += 0.37) {
            bool near_kink = false;
            for (double k : tr.kinks()) near_kink = near_kink || std::abs(t - k) < 2 * h;
            if (near_kink) continue;
            const BoundsSample s = sample_bounds(tr, t);
            const BoundsSample p = sample_bounds(tr, t + h);
            const BoundsSample m = sample_bounds(tr, t - h);
            CHECK(std::abs((p.a - m.a) / (2 * h) - s.da) <= 1e-6);
            CHECK(std::abs((p.b - m.b) / (2 * h) - s.db) <= 1e-6);
        }
    }
}

TEST_CASE("min width over the benchmark horizon") {
    const double w = min_width(BoundaryTrajectory::paper_benchmark(), 0.0, 15.0);
    // w' = -0.02 + 0.025 sin(t/4) vanishes where sin(t/4) = 0.8, cos(t/4) = 0.6.
    const double t_min = 4.0 * std::asin(0.8);
    const double exact = 0.3 - 0.02 * t_min - 0.06;
    CHECK(w >= exact);
    CHECK(w == Approx(exact).epsilon(1e-6));
}
