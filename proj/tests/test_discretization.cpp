#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mbph/discretization.hpp"
#include "mbph/errors.hpp"

using namespace mbph;
using doctest::Approx;

namespace {

Vec v2(double a, double b) {
    Vec v(2);
    v << a, b;
    return v;
}

BoundsSample bounds(double a, double b, double da, double db) { return {0.0, a, b, da, db}; }

DiscreteState random_state(int N, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    DiscreteState x(2, N);
    for (Eigen::Index k = 0; k < x.data.size(); ++k) x.data(k) = U(rng);
    return x;
}

} // namespace

TEST_CASE("mesh nodes") {
    const Mesh m(4);
    CHECK(m.nodes() == 5);
    CHECK(m.node(0) == 0.0);
    CHECK(m.node(1) == 0.25);
    CHECK(m.node(4) == 1.0);
    CHECK_THROWS_AS(m.node(5), IndexError);
    CHECK_THROWS_AS(m.node(-1), IndexError);
    CHECK_THROWS_AS(Mesh(0), ParameterError);
}

TEST_CASE("basis functions") {
    const Mesh m(5);
    for (int i = 0; i <= 5; ++i)
        for (int j = 0; j <= 5; ++j)
            CHECK(basis_omega_node(m, i, m.node(j)) == (i == j ? 1.0 : 0.0));
    for (int i = 0; i < 5; ++i) {
        const std::vector<double> breaks{m.node(i), m.node(i + 1)};
        CHECK(integrate([&](double u) { return basis_omega_elem(m, i, u); }, 0.0, 1.0, {4, 1}, breaks) ==
              Approx(1.0).epsilon(1e-14));
        CHECK(basis_omega_elem(m, i, m.node(i)) == 2.5);
        // omega_elem(i) is the slope of hat i+1 on element i.
        const double u = m.node(i) + 0.37 / 5, h = 1e-7;
        const double slope =
            (basis_omega_node(m, i + 1, u + h) - basis_omega_node(m, i + 1, u - h)) / (2 * h);
        CHECK(slope == Approx(basis_omega_elem(m, i, u)).epsilon(1e-6));
    }
    CHECK_THROWS_AS(basis_omega_elem(m, 5, 0.5), IndexError);
    CHECK_THROWS_AS(basis_omega_node(m, 6, 0.5), IndexError);
    CHECK_THROWS_AS(basis_omega_node(m, 0, 1.5), DomainError);
}

TEST_CASE("nodal reconstruction example") {
    const PHSystem unit = tl_system(1.0, 1.0);
    DiscreteState x(2, 2);
    x.data << 0.5, 0.25, 0.75, 0.25;
    const NodalEfforts e = reconstruct_nodal_efforts(unit, Mesh(2), x, {0, 0.5, 1, 0.5});
    Vec expected(6);
    expected << 0.5, 0.5, 1.5, 0.5, 1.5, 0.5;
    CHECK((e.data - expected).norm() <= 1e-15);

    const NodalEfforts z = reconstruct_nodal_efforts(unit, Mesh(3), DiscreteState(2, 3), {});
    CHECK(z.data.norm() == 0.0);
}

TEST_CASE("reconstruction satisfies the element averages") {
    const PHSystem tl = tl_system(0.7, 1.9);
    for (int N : {1, 3, 17, 64}) {
        const DiscreteState x = random_state(N, N);
        const Mesh m(N);
        const NodalEfforts e = reconstruct_nodal_efforts(tl, m, x, {0, 0.3, 1, -0.8});
        CHECK(e.node(0)(0) == 0.3);
        CHECK(e.node(N)(1) == -0.8);
        for (int i = 0; i < N; ++i) {
            const Vec avg = 0.5 * (e.node(i) + e.node(i + 1));
            CHECK((avg - N * tl.Q * x.element(i)).norm() <= 1e-13 * N);
        }
        // Swapped closure: current imposed on the left.
        const NodalEfforts s = reconstruct_nodal_efforts(tl, m, x, {1, 0.1, 0, 0.2});
        CHECK(s.node(0)(1) == 0.1);
        CHECK(s.node(N)(0) == 0.2);
    }
}

TEST_CASE("reconstruction closure errors") {
    const PHSystem tl = tl_system(1.0, 1.0);
    CHECK_THROWS_AS(reconstruct_nodal_efforts(tl, Mesh(2), DiscreteState(2, 2), {0, 0.0, 0, 0.0}),
                    UnsupportedClosure);
    Mat J(3, 3);
    J << 1, 0, 0, 0, 0, 1, 0, 1, 0;
    const PHSystem three = PHSystem::from_matrices(Mat::Zero(3, 3), J, Mat::Identity(3, 3));
    CHECK_THROWS_AS(reconstruct_nodal_efforts(three, Mesh(2), DiscreteState(3, 2), {}),
                    UnsupportedClosure);
}

TEST_CASE("element rhs examples") {
    const PHSystem tl = tl_system(1.0, 1.0);
    const Mesh m(4);
    const Vec f = element_rhs(tl, bounds(0.0, 1.0, 0.0, 0.0), m, 1, v2(0.3, 0.1), v2(0, 0), v2(0, 1));
    CHECK((f - v2(-1.0, 0.0)).norm() <= 1e-15);

    const Vec c = element_rhs(tl, bounds(0.2, 0.6, 0.0, 0.0), m, 2, v2(0.1, 0.1), v2(0.4, 0.4), v2(0.4, 0.4));
    CHECK(c.norm() == 0.0);

    // Rigid translation: no compression term, pure advection with alpha = v / w.
    const double v = 0.05, w = 0.4;
    const Vec ei = v2(0.2, -0.1), en = v2(0.5, 0.3);
    const Vec t = element_rhs(tl, bounds(0.2, 0.6, v, v), m, 0, v2(9.0, 9.0), ei, en);
    const Vec expected = (v / w) * (en - ei) + v2(-(en(1) - ei(1)), -(en(0) - ei(0))) / w;
    CHECK((t - expected).norm() <= 1e-15);

    CHECK_THROWS_AS(element_rhs(tl, bounds(0.2, 0.6, -0.1, 0.1), m, 0, ei, ei, en), AssumptionViolation);
    CHECK_THROWS_AS(element_rhs(tl, bounds(0.2, 0.6, 0, 0), m, 4, ei, ei, en), IndexError);
}

TEST_CASE("static element rhs matches the classical scheme") {
    // Classical mixed scheme: dq/dt = -(I_{i+1} - I_i)/w, dphi/dt = -(V_{i+1} - V_i)/w.
    const PHSystem tl = tl_system(1.3, 0.4);
    const int N = 12;
    const Mesh m(N);
    const BoundsSample b = bounds(0.2, 0.45, 0.0, 0.0);
    const DiscreteState x = random_state(N, 4);
    const NodalEfforts e = reconstruct_nodal_efforts(tl, m, x, {0, 0.2, 1, 0.6});
    for (int i = 0; i < N; ++i) {
        const Vec f = element_rhs(tl, b, m, i, x.element(i), e.node(i), e.node(i + 1));
        const double fq = -(e.node(i + 1)(1) - e.node(i)(1)) / b.width();
        const double fphi = -(e.node(i + 1)(0) - e.node(i)(0)) / b.width();
        CHECK(std::abs(f(0) - fq) <= 1e-14);
        CHECK(std::abs(f(1) - fphi) <= 1e-14);
    }
}

TEST_CASE("kernels agree with element_rhs; serial and parallel are identical") {
    Mat J0(2, 2);
    J0 << 0, 0.3, -0.3, 0;
    Mat Q(2, 2);
    Q << 2.0, 0.4, 0.4, 1.0;
    const PHSystem sys = PHSystem::from_matrices(J0, tl_system(1, 1).J1, Q);
    for (int N : {1, 7, 5000}) {
        const Mesh m(N);
        const BoundsSample b = bounds(0.2, 0.47, 0.02, 0.011);
        const DiscreteState x = random_state(N, 100 + N);
        const NodalEfforts e = reconstruct_nodal_efforts(sys, m, x, {0, 0.1, 1, 0.2});
        DiscreteState s(2, N), p(2, N);
        semi_discrete_rhs_serial(sys, b, m, x, e, s);
        semi_discrete_rhs_parallel(sys, b, m, x, e, p);
        CHECK(s.data == p.data);
        for (int i = 0; i < N; i += std::max(1, N / 10)) {
            const Vec f = element_rhs(sys, b, m, i, x.element(i), e.node(i), e.node(i + 1));
            CHECK((f - s.element(i)).norm() <= 1e-13 * std::max(1.0, f.norm()));
        }
    }
    DiscreteState wrong(2, 3);
    CHECK_THROWS_AS(semi_discrete_rhs_serial(sys, bounds(0, 1, 0, 0), Mesh(2), DiscreteState(2, 2),
                                             NodalEfforts(2, 2), wrong),
                    ParameterError);
}

TEST_CASE("discrete hamiltonian examples") {
    const PHSystem unit = tl_system(1.0, 1.0);
    CHECK(discrete_hamiltonian(unit, Mesh(3), DiscreteState(2, 3)) == 0.0);
    DiscreteState one(2, 1);
    one.data << 1.0, 1.0;
    CHECK(discrete_hamiltonian(unit, Mesh(1), one) == Approx(1.0));
    DiscreteState four(2, 4);
    for (int i = 0; i < 4; ++i) four.element(i) = v2(0.25, 0.0);
    CHECK(discrete_hamiltonian(unit, Mesh(4), four) == Approx(0.5));
    CHECK(element_hamiltonians(unit, Mesh(4), four).size() == 4);
}

TEST_CASE("element ports") {
    const PHSystem tl = tl_system(1.5, 0.5);
    const BoundsSample b = bounds(0.2, 0.45, 0.02, 0.013);
    const Vec e0 = v2(0.3, -0.2), e1 = v2(1.1, 0.4);
    const PortVector d = discrete_element_ports(tl, b, Mesh(1), 0, e0, e1);
    const PortVector c = boundary_ports(tl, b, e0, e1);
    CHECK(d.flow == c.flow);
    CHECK(d.effort == c.effort);

    const PortVector st = discrete_element_ports(tl, bounds(0.2, 0.45, 0, 0), Mesh(5), 2, e0, e1);
    CHECK(st.motion_flow().norm() == 0.0);
    CHECK(st.motion_effort().norm() == 0.0);

    const BoundsSample bench = eval_bounds(BoundaryTrajectory::paper_benchmark(), 3.0);
    const Mesh m(10);
    const DiscreteState x = random_state(10, 8);
    const NodalEfforts e = reconstruct_nodal_efforts(tl, m, x, {0, 0.1, 1, 0.1});
    for (int i = 0; i < 10; ++i) {
        const PortVector p = discrete_element_ports(tl, bench, m, i, e.node(i), e.node(i + 1));
        CHECK(p.flow.allFinite());
        CHECK(std::abs(p.power().imag()) <= 1e-12 * std::abs(p.power()));
    }
}

TEST_CASE("power audit") {
    const PHSystem tl = tl_system(1.0, 1.0);
    const int N = 10;
    const Mesh m(N);

    const DiscreteState zero(2, N);
    const NodalEfforts ez = reconstruct_nodal_efforts(tl, m, zero, {});
    DiscreteState fz(2, N);
    const BoundsSample bench = eval_bounds(BoundaryTrajectory::paper_benchmark(), 3.0);
    semi_discrete_rhs_serial(tl, bench, m, zero, ez, fz);
    const PowerAudit az = discrete_power_audit(tl, bench, m, zero, ez, fz);
    CHECK(az.dH_dt == 0.0);
    CHECK(az.port_power == 0.0);
    CHECK(az.residual == 0.0);

    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const DiscreteState x = random_state(N, seed);
        const NodalEfforts e = reconstruct_nodal_efforts(tl, m, x, {0, 0.3, 1, -0.1});
        DiscreteState f(2, N);
        const BoundsSample st = bounds(0.2, 0.4, 0.0, 0.0);
        semi_discrete_rhs_serial(tl, st, m, x, e, f);
        const PowerAudit a = discrete_power_audit(tl, st, m, x, e, f);
        CHECK(a.residual <= 1e-12 * std::max(a.scale(), 1.0));

        semi_discrete_rhs_serial(tl, bench, m, x, e, f);
        const PowerAudit mv = discrete_power_audit(tl, bench, m, x, e, f);
        CHECK(mv.residual > 1e-10);
        CHECK(std::abs(mv.port_power_imag) <= 1e-12 * std::abs(mv.port_power));
    }
}

TEST_CASE("element representation converges at first order") {
    const Field smooth = Field::closed_form(
        2, [](double u) { return v2(std::sin(3 * u), std::cos(2 * u)); },
        [](double u) { return v2(3 * std::cos(3 * u), -2 * std::sin(2 * u)); });
    std::vector<double> errs;
    const std::vector<int> Ns{10, 20, 40, 80};
    for (int N : Ns) {
        const Mesh m(N);
        const DiscreteState x = project_state(m, smooth);
        // Element integrals are exact.
        const double exact0 = (1.0 - std::cos(3.0 * m.node(1))) / 3.0;
        CHECK(x.element(0)(0) == Approx(exact0).epsilon(1e-13));
        const Field rep = element_field(m, x);
        const Field diff = rep.combined(1.0, smooth, -1.0);
        errs.push_back(std::sqrt(inner_l2(diff, diff, {8, 1})));
    }
    for (std::size_t k = 0; k + 1 < errs.size(); ++k) CHECK(std::log2(errs[k] / errs[k + 1]) >= 0.9);
}

TEST_CASE("nodal field interpolates") {
    NodalEfforts e(2, 2);
    e.data << 0, 1, 2, 3, 4, 5;
    const Field f = nodal_field(Mesh(2), e);
    CHECK((f(0.25) - v2(1.0, 2.0)).norm() <= 1e-15);
}
