#include "mbph/discretization.hpp"

#include <cmath>
#include <sstream>

#include "mbph/errors.hpp"

namespace mbph {

Mesh::Mesh(int elements) : N_(elements) {
    if (elements < 1) throw ParameterError("mesh needs at least one element");
}

double Mesh::node(int i) const {
    if (i < 0 || i > N_) {
        std::ostringstream os;
        os << "node index " << i << " outside [0, " << N_ << "]";
        throw IndexError(os.str());
    }
    if (i == N_) return 1.0;
    return static_cast<double>(i) / N_;
}

namespace {

void require_unit(double u) {
    if (!(u >= 0.0 && u <= 1.0)) throw DomainError("basis functions are defined on [0, 1]");
}

} // namespace

double basis_omega_elem(const Mesh& mesh, int i, double u) {
    if (i < 0 || i >= mesh.elements()) throw IndexError("element index out of range");
    require_unit(u);
    const double lo = mesh.node(i);
    const double hi = mesh.node(i + 1);
    const double N = mesh.elements();
    if (u == lo || u == hi) return 0.5 * N;
    if (u > lo && u < hi) return N;
    return 0.0;
}

double basis_omega_node(const Mesh& mesh, int i, double u) {
    if (i < 0 || i > mesh.elements()) throw IndexError("node index out of range");
    require_unit(u);
    const double N = mesh.elements();
    const double ui = mesh.node(i);
    if (u == ui) return 1.0;
    if (i < mesh.elements()) {
        const double next = mesh.node(i + 1);
        if (u >= ui && u < next) return N * (next - u);
    }
    if (i > 0) {
        const double prev = mesh.node(i - 1);
        if (u > prev && u < ui) return N * (u - prev);
    }
    return 0.0;
}

NodalEfforts reconstruct_nodal_efforts(const PHSystem& sys, const Mesh& mesh,
                                       const DiscreteState& x, const BoundaryValues& bc) {
    if (sys.n() != 2 || x.n != 2)
        throw UnsupportedClosure("nodal effort reconstruction supports two-component systems only");
    if (bc.left_component == bc.right_component || bc.left_component < 0 ||
        bc.left_component > 1 || bc.right_component < 0 || bc.right_component > 1)
        throw UnsupportedClosure("need one distinct effort component imposed at each end");
    const int N = mesh.elements();
    if (x.N != N) throw ParameterError("state and mesh element counts differ");

    NodalEfforts e(2, N);
    const double q00 = sys.Q(0, 0), q01 = sys.Q(0, 1), q10 = sys.Q(1, 0), q11 = sys.Q(1, 1);
    const double* xs = x.data.data();
    double* es = e.data.data();
    auto elem_effort = [&](int i, int k) {
        const double x0 = xs[2 * i], x1 = xs[2 * i + 1];
        return N * (k == 0 ? q00 * x0 + q01 * x1 : q10 * x0 + q11 * x1);
    };

    const int lc = bc.left_component;
    es[lc] = bc.left;
    for (int i = 0; i < N; ++i) es[2 * (i + 1) + lc] = 2.0 * elem_effort(i, lc) - es[2 * i + lc];

    const int rc = bc.right_component;
    es[2 * N + rc] = bc.right;
    for (int i = N - 1; i >= 0; --i) es[2 * i + rc] = 2.0 * elem_effort(i, rc) - es[2 * (i + 1) + rc];
    return e;
}

Vec element_rhs(const PHSystem& sys, const BoundsSample& bounds, const Mesh& mesh, int i,
                const Vec& x_elem, const Vec& e_i, const Vec& e_next) {
    check_assumption(bounds);
    if (i < 0 || i >= mesh.elements()) throw IndexError("element index out of range");
    const double w = bounds.width();
    const double rate = (bounds.db - bounds.da) / w;
    const double alpha_i = chart_velocity(bounds, mesh.node(i)) / w;
    const double alpha_n = chart_velocity(bounds, mesh.node(i + 1)) / w;
    return -0.5 * rate * x_elem - alpha_i * (sys.Qinv * e_i) + alpha_n * (sys.Qinv * e_next) +
           (sys.J1 * (e_next - e_i)) / w + (sys.J0 * (e_i + e_next)) * (0.5 / mesh.elements());
}

namespace {

// Flat copies of the small system matrices for the element kernel.
struct KernelCoefficients {
    int n;
    int N;
    double w;
    double rate;
    double da;
    double ddelta;
    bool has_J0;
    std::vector<double> Qinv;
    std::vector<double> J1;
    std::vector<double> J0;

    KernelCoefficients(const PHSystem& sys, const BoundsSample& bounds, const Mesh& mesh)
        : n(sys.n()),
          N(mesh.elements()),
          w(bounds.width()),
          rate((bounds.db - bounds.da) / bounds.width()),
          da(bounds.da),
          ddelta(bounds.db - bounds.da),
          has_J0(!sys.J0.isZero(0.0)),
          Qinv(n * n),
          J1(n * n),
          J0(n * n) {
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) {
                Qinv[r * n + c] = sys.Qinv(r, c);
                J1[r * n + c] = sys.J1(r, c);
                J0[r * n + c] = sys.J0(r, c);
            }
    }

    double alpha(int node) const {
        const double u = node == N ? 1.0 : static_cast<double>(node) / N;
        return (da + ddelta * u) / w;
    }
};

inline void element_kernel(const KernelCoefficients& kc, int i, const double* x, const double* e,
                           double* dx) {
    const int n = kc.n;
    const double ai = kc.alpha(i);
    const double an = kc.alpha(i + 1);
    const double* ei = e + i * n;
    const double* en = e + (i + 1) * n;
    const double* xi = x + i * n;
    double* out = dx + i * n;
    for (int r = 0; r < n; ++r) {
        double acc = -0.5 * kc.rate * xi[r];
        for (int c = 0; c < n; ++c) {
            acc += kc.Qinv[r * n + c] * (an * en[c] - ai * ei[c]);
            acc += kc.J1[r * n + c] * (en[c] - ei[c]) / kc.w;
        }
        if (kc.has_J0)
            for (int c = 0; c < n; ++c) acc += kc.J0[r * n + c] * (ei[c] + en[c]) * (0.5 / kc.N);
        out[r] = acc;
    }
}

void check_kernel_args(const PHSystem& sys, const Mesh& mesh, const DiscreteState& x,
                       const NodalEfforts& e, const DiscreteState& dx) {
    const int n = sys.n();
    const int N = mesh.elements();
    if (x.n != n || x.N != N || e.n != n || e.N != N || dx.n != n || dx.N != N ||
        dx.data.size() != x.data.size())
        throw ParameterError("state, efforts and output disagree with the mesh");
}

} // namespace

void semi_discrete_rhs_serial(const PHSystem& sys, const BoundsSample& bounds, const Mesh& mesh,
                              const DiscreteState& x, const NodalEfforts& e, DiscreteState& dx) {
    check_kernel_args(sys, mesh, x, e, dx);
    const KernelCoefficients kc(sys, bounds, mesh);
    for (int i = 0; i < kc.N; ++i) element_kernel(kc, i, x.data.data(), e.data.data(), dx.data.data());
}

void semi_discrete_rhs_parallel(const PHSystem& sys, const BoundsSample& bounds, const Mesh& mesh,
                                const DiscreteState& x, const NodalEfforts& e, DiscreteState& dx) {
    check_kernel_args(sys, mesh, x, e, dx);
    const KernelCoefficients kc(sys, bounds, mesh);
    const double* xs = x.data.data();
    const double* es = e.data.data();
    double* out = dx.data.data();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < kc.N; ++i) element_kernel(kc, i, xs, es, out);
}

std::vector<double> element_hamiltonians(const PHSystem& sys, const Mesh& mesh,
                                         const DiscreteState& x) {
    std::vector<double> h(x.N);
    for (int i = 0; i < x.N; ++i) {
        const Vec xi = x.element(i);
        h[i] = 0.5 * mesh.elements() * xi.dot(sys.Q * xi);
    }
    return h;
}

double discrete_hamiltonian(const PHSystem& sys, const Mesh& mesh, const DiscreteState& x) {
    double H = 0.0;
    for (double h : element_hamiltonians(sys, mesh, x)) H += h;
    return H;
}

PortVector discrete_element_ports(const PHSystem& sys, const BoundsSample& bounds,
                                  const Mesh& mesh, int i, const Vec& e_i, const Vec& e_next) {
    if (i < 0 || i >= mesh.elements()) throw IndexError("element index out of range");
    BoundsSample local = bounds;
    local.da = chart_velocity(bounds, mesh.node(i));
    local.db = chart_velocity(bounds, mesh.node(i + 1));
    return boundary_ports(sys, local, e_i, e_next);
}

PowerAudit discrete_power_audit(const PHSystem& sys, const BoundsSample& bounds, const Mesh& mesh,
                                const DiscreteState& x, const NodalEfforts& e,
                                const DiscreteState& f) {
    (void)x;
    PowerAudit audit;
    Complex port = 0.0;
    for (int i = 0; i < mesh.elements(); ++i) {
        const Vec ei = e.node(i);
        const Vec en = e.node(i + 1);
        audit.dH_dt += (0.5 * (ei + en)).dot(f.element(i));
        port += discrete_element_ports(sys, bounds, mesh, i, ei, en).power();
    }
    audit.port_power = port.real();
    audit.port_power_imag = port.imag();
    audit.residual = std::abs(Complex(audit.dH_dt) - port);
    return audit;
}

DiscreteState project_state(const Mesh& mesh, const Field& xhat, const QuadSpec& quad) {
    const int n = xhat.dim();
    DiscreteState x(n, mesh.elements());
    for (int i = 0; i < mesh.elements(); ++i) {
        const QuadPoints q =
            composite_points(mesh.node(i), mesh.node(i + 1), quad, xhat.breakpoints());
        Vec acc = Vec::Zero(n);
        for (std::size_t k = 0; k < q.x.size(); ++k) acc += q.w[k] * xhat(q.x[k]);
        x.element(i) = acc;
    }
    return x;
}

Field element_field(const Mesh& mesh, const DiscreteState& x) {
    const int N = mesh.elements();
    auto value = [x, N](double u) -> Vec {
        const int i = std::min(N - 1, static_cast<int>(std::floor(u * N)));
        return static_cast<double>(N) * x.element(std::max(0, i));
    };
    std::vector<double> breaks;
    for (int i = 1; i < N; ++i) breaks.push_back(mesh.node(i));
    return Field::value_only(x.n, std::move(value), 0.0, 1.0, std::move(breaks));
}

Field nodal_field(const Mesh& mesh, const NodalEfforts& e) {
    std::vector<double> nodes(mesh.nodes());
    Mat values(e.n, mesh.nodes());
    for (int i = 0; i < mesh.nodes(); ++i) {
        nodes[i] = mesh.node(i);
        values.col(i) = e.node(i);
    }
    return Field::sampled(std::move(nodes), std::move(values));
}

} // namespace mbph
