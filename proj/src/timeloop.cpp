#include "mbph/timeloop.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>

#include "mbph/errors.hpp"

namespace mbph {

TLState analytic_tl(double t, double s, double inductance, double capacitance) {
    return reference_tl(Solution::PaperWave, t, s, inductance, capacitance);
}

std::string to_string(Solution s) {
    return s == Solution::PaperWave ? "paper_wave" : "smooth_wave";
}

Solution solution_from_string(const std::string& name) {
    if (name == "paper_wave") return Solution::PaperWave;
    if (name == "smooth_wave") return Solution::SmoothWave;
    throw ConfigError("unknown solution '" + name + "' (expected paper_wave or smooth_wave)");
}

TLState reference_tl(Solution sol, double t, double s, double inductance, double capacitance) {
    const double c = 1.0 / std::sqrt(inductance * capacitance);
    const double Z = std::sqrt(inductance / capacitance);
    double arg = t - s / c;
    if (sol == Solution::PaperWave) arg = std::max(0.0, arg);
    TLState r;
    r.V = std::sin(arg);
    r.I = r.V / Z;
    r.q = capacitance * r.V;
    r.phi = inductance * r.I;
    return r;
}

StateHistory analytic_state_history(const BoundaryTrajectory& traj, Solution sol,
                                    double inductance, double capacitance) {
    const double L = inductance, C = capacitance;
    return [traj, sol, L, C](double t) -> Field {
        const BoundsSample b = eval_bounds(traj, t);
        std::vector<double> breaks;
        const double front = t / std::sqrt(L * C);
        if (sol == Solution::PaperWave && front > b.a && front < b.b) breaks.push_back(front);
        const Field physical = Field::value_only(
            2,
            [sol, t, L, C](double s) -> Vec {
                const TLState r = reference_tl(sol, t, s, L, C);
                Vec v(2);
                v << r.q, r.phi;
                return v;
            },
            b.a, b.b, std::move(breaks));
        return push_forward(physical, b);
    };
}

double wave_speed(const SimConfig& cfg) {
    return 1.0 / std::sqrt(cfg.inductance * cfg.capacitance);
}

double max_stable_dt(const SimConfig& cfg) {
    const double w = min_width(cfg.trajectory, 0.0, cfg.t_end);
    const double c = wave_speed(cfg);
    const double N = cfg.n_elements;
    return std::min(w / (N * N * c), 0.5 * w / (N * c));
}

double default_dt(const SimConfig& cfg) { return cfg.cfl_fraction * max_stable_dt(cfg); }

void validate(const SimConfig& cfg) {
    if (!(cfg.inductance > 0.0) || !(cfg.capacitance > 0.0))
        throw ParameterError("transmission line needs L > 0 and C > 0");
    if (cfg.n_elements < 1) throw ParameterError("n_elements must be >= 1");
    if (!(cfg.t_end > 0.0) || !std::isfinite(cfg.t_end)) throw ParameterError("t_end must be > 0");
    if (!(cfg.cfl_fraction > 0.0) || cfg.cfl_fraction > 1.0)
        throw ParameterError("cfl_fraction must lie in (0, 1]");
    if (cfg.output_interval < 0.0) throw ParameterError("output_interval must be >= 0");
    if (cfg.quad.order < 1 || cfg.quad.panels < 1) throw ParameterError("bad quadrature spec");
    validate_trajectory(cfg.trajectory, 0.0, cfg.t_end);
    if (cfg.dt) {
        if (!(*cfg.dt > 0.0) || !std::isfinite(*cfg.dt)) throw ParameterError("dt must be > 0");
        const double bound = max_stable_dt(cfg);
        if (*cfg.dt > bound) {
            std::ostringstream os;
            os.precision(17);
            os << "dt = " << *cfg.dt << " exceeds the CFL bound min(w_min/(N^2 c), 0.5 w_min/(N c)) = "
               << bound << " (N = " << cfg.n_elements << ", c = " << wave_speed(cfg) << ")";
            throw CflViolation(os.str());
        }
    }
}

// ---------------------------------------------------------------------------

BenchmarkModel::BenchmarkModel(const SimConfig& cfg)
    : cfg_(cfg), sys_(tl_system(cfg.inductance, cfg.capacitance)), mesh_(cfg.n_elements) {}

BoundaryValues BenchmarkModel::boundary_values(const BoundsSample& bounds) const {
    const double sw = std::sqrt(bounds.width());
    BoundaryValues bv;
    bv.left_component = 0;
    bv.left = sw * reference_tl(cfg_.solution, bounds.t, bounds.a, cfg_.inductance, cfg_.capacitance).V;
    bv.right_component = 1;
    bv.right = sw * reference_tl(cfg_.solution, bounds.t, bounds.b, cfg_.inductance, cfg_.capacitance).I;
    return bv;
}

NodalEfforts BenchmarkModel::efforts(const BoundsSample& bounds, const DiscreteState& x) const {
    return reconstruct_nodal_efforts(sys_, mesh_, x, boundary_values(bounds));
}

DiscreteState BenchmarkModel::rhs(const BoundsSample& bounds, const DiscreteState& x) const {
    const NodalEfforts e = efforts(bounds, x);
    DiscreteState dx(x.n, x.N);
    if (mesh_.elements() >= kParallelElementThreshold)
        semi_discrete_rhs_parallel(sys_, bounds, mesh_, x, e, dx);
    else
        semi_discrete_rhs_serial(sys_, bounds, mesh_, x, e, dx);
    return dx;
}

DiscreteState BenchmarkModel::initial_state() const {
    const BoundsSample b0 = eval_bounds(cfg_.trajectory, 0.0);
    const Solution sol = cfg_.solution;
    const double L = cfg_.inductance, C = cfg_.capacitance;
    const Field physical = Field::value_only(
        2,
        [sol, L, C](double s) -> Vec {
            const TLState r = reference_tl(sol, 0.0, s, L, C);
            Vec v(2);
            v << r.q, r.phi;
            return v;
        },
        b0.a, b0.b);
    return project_state(mesh_, push_forward(physical, b0), cfg_.quad);
}

SimRecord BenchmarkModel::record(const BoundsSample& bounds, const DiscreteState& x) const {
    SimRecord rec;
    rec.bounds = bounds;
    rec.x = x;
    rec.e = efforts(bounds, x);
    rec.H = discrete_hamiltonian(sys_, mesh_, x);
    DiscreteState f(x.n, x.N);
    semi_discrete_rhs_serial(sys_, bounds, mesh_, x, rec.e, f);
    rec.audit = discrete_power_audit(sys_, bounds, mesh_, x, rec.e, f);
    rec.max_err = error_field(rec, cfg_.solution, cfg_.inductance, cfg_.capacitance);
    return rec;
}

double error_field(const SimRecord& rec, Solution sol, double inductance, double capacitance) {
    const int N = rec.x.N;
    const double w = rec.bounds.width();
    const double sw = std::sqrt(w);
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
        const double u = (i + 0.5) / N;
        const double V_sim = N * rec.x.element(i)(0) / capacitance / sw;
        const double V_true =
            reference_tl(sol, rec.bounds.t, chart(rec.bounds, u), inductance, capacitance).V;
        worst = std::max(worst, std::abs(V_sim - V_true));
    }
    return worst;
}

namespace {

struct Segment {
    double start;
    double end;
};

std::vector<Segment> segments(const BoundaryTrajectory& traj, double t_end) {
    std::vector<double> cuts{0.0};
    for (double k : traj.kinks())
        if (k > 0.0 && k < t_end) cuts.push_back(k);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    cuts.push_back(t_end);
    std::vector<Segment> out;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) out.push_back({cuts[k], cuts[k + 1]});
    return out;
}

// Bounds for a stage inside `seg`. Times are clamped into the segment and the
// velocity is taken from the segment's own side of any kink at its ends.
BoundsSample stage_bounds(const BoundaryTrajectory& traj, const Segment& seg, double t) {
    const double tc = std::clamp(t, seg.start, seg.end);
    const Side side = tc > 0.5 * (seg.start + seg.end) ? Side::Left : Side::Right;
    return eval_bounds(traj, tc, side);
}

void check_finite(const DiscreteState& x, double t_good) {
    if (!x.data.allFinite()) {
        std::ostringstream os;
        os.precision(17);
        os << "state became non-finite after t = " << t_good;
        throw NonFiniteState(os.str());
    }
}

} // namespace

SimSummary simulate(const SimConfig& cfg, const RecordSink& sink) {
    validate(cfg);
    const BenchmarkModel model(cfg);
    const double dt = cfg.dt ? *cfg.dt : default_dt(cfg);

    SimSummary sum;
    sum.dt = dt;
    sum.H_min = std::numeric_limits<double>::infinity();
    sum.H_max = -std::numeric_limits<double>::infinity();

    auto emit = [&](const BoundsSample& b, const DiscreteState& x) {
        const SimRecord rec = model.record(b, x);
        if (!std::isfinite(rec.H) || !std::isfinite(rec.audit.residual) || !std::isfinite(rec.max_err))
            throw NonFiniteState("non-finite diagnostics at t = " + std::to_string(b.t));
        ++sum.rows;
        sum.t_last = b.t;
        sum.max_error = std::max(sum.max_error, rec.max_err);
        sum.max_scale = std::max(sum.max_scale, rec.audit.scale());
        sum.H_min = std::min(sum.H_min, rec.H);
        sum.H_max = std::max(sum.H_max, rec.H);
        if (b.da != 0.0 || b.db != 0.0) {
            sum.max_residual_moving = std::max(sum.max_residual_moving, rec.audit.residual);
        } else {
            sum.max_residual_static = std::max(sum.max_residual_static, rec.audit.residual);
            sum.max_relative_residual_static =
                std::max(sum.max_relative_residual_static,
                         rec.audit.residual / std::max(std::abs(rec.audit.dH_dt), 1.0));
        }
        if (sink) sink(rec);
    };

    DiscreteState x = model.initial_state();
    const auto segs = segments(cfg.trajectory, cfg.t_end);
    emit(stage_bounds(cfg.trajectory, segs.front(), 0.0), x);

    const double interval = cfg.output_interval;
    double next_out = interval;
    double t = 0.0;
    for (const Segment& seg : segs) {
        const double len = seg.end - seg.start;
        const long n = std::max(1L, static_cast<long>(std::ceil(len / dt - 1e-9)));
        const double h = len / static_cast<double>(n);
        auto rhs = [&](double tt, const Vec& data) -> Vec {
            DiscreteState s(x.n, x.N);
            s.data = data;
            return model.rhs(stage_bounds(cfg.trajectory, seg, tt), s).data;
        };
        for (long j = 0; j < n; ++j) {
            const double t0 = seg.start + static_cast<double>(j) * h;
            x.data = rk4_step(rhs, x.data, t0, h);
            check_finite(x, t);
            t = j + 1 == n ? seg.end : seg.start + static_cast<double>(j + 1) * h;
            ++sum.steps;
            const bool last = j + 1 == n && seg.end == cfg.t_end;
            if (interval == 0.0 || t >= next_out - 1e-9 * h || last) {
                emit(stage_bounds(cfg.trajectory, seg, t), x);
                if (interval > 0.0)
                    while (next_out <= t + 1e-9 * h) next_out += interval;
            }
        }
    }
    return sum;
}

std::vector<ConvergenceRow> convergence_study(const SimConfig& cfg, const std::vector<int>& n_list) {
    if (n_list.empty()) throw ParameterError("convergence study needs at least one N");
    if (!std::is_sorted(n_list.begin(), n_list.end()) ||
        std::adjacent_find(n_list.begin(), n_list.end()) != n_list.end())
        throw ParameterError("N list must be strictly ascending");
    std::vector<SimConfig> members(n_list.size(), cfg);
    for (std::size_t k = 0; k < n_list.size(); ++k) {
        members[k].n_elements = n_list[k];
        if (cfg.dt) {
            const double r = static_cast<double>(n_list.front()) / n_list[k];
            members[k].dt = *cfg.dt * r * r;
        }
        validate(members[k]);
    }

    std::vector<ConvergenceRow> rows(n_list.size());
    std::vector<std::exception_ptr> errors(n_list.size());
    const long count = static_cast<long>(n_list.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long k = 0; k < count; ++k) {
        try {
            const SimSummary s = simulate(members[k]);
            rows[k] = {members[k].n_elements, s.dt, s.max_error,
                       std::max(s.max_residual_moving, s.max_residual_static)};
        } catch (...) {
            errors[k] = std::current_exception();
        }
    }
    for (const auto& err : errors)
        if (err) std::rethrow_exception(err);
    return rows;
}

double observed_order(const std::vector<ConvergenceRow>& rows) {
    if (rows.size() < 2) throw ParameterError("need two rows to fit an order");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(rows.size());
    for (const auto& r : rows) {
        const double lx = std::log(static_cast<double>(r.n_elements));
        const double ly = std::log(r.max_error);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return -(n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace mbph
