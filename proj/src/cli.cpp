#include "mbph/cli.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mbph/errors.hpp"

namespace mbph {

using nlohmann::json;
namespace fs = std::filesystem;

int exit_code_for(const std::string& kind) {
    if (kind == "NonFiniteState") return kExitNumeric;
    if (kind == "InternalError") return kExitNumeric;
    return kExitValidation;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string sim_csv_header(int n_elements) {
    std::string h = "t,a,b,da,db,H,dH_dt,port_power,residual,max_err";
    for (int k = 1; k <= 2 * n_elements; ++k) h += ",x_" + std::to_string(k);
    for (int k = 1; k <= 2 * (n_elements + 1); ++k) h += ",e_" + std::to_string(k);
    return h;
}

std::string sim_csv_row(const SimRecord& rec) {
    const BoundsSample& b = rec.bounds;
    std::string row;
    row.reserve(24 * static_cast<std::size_t>(10 + rec.x.data.size() + rec.e.data.size()));
    for (double v : {b.t, b.a, b.b, b.da, b.db, rec.H, rec.audit.dH_dt, rec.audit.port_power,
                     rec.audit.residual, rec.max_err}) {
        if (!row.empty()) row += ',';
        row += format_double(v);
    }
    for (Eigen::Index k = 0; k < rec.x.data.size(); ++k) row += ',' + format_double(rec.x.data(k));
    for (Eigen::Index k = 0; k < rec.e.data.size(); ++k) row += ',' + format_double(rec.e.data(k));
    return row;
}

std::string power_csv_header() { return "t,dH_dt,port_power,residual"; }

std::string power_csv_row(const SimRecord& rec) {
    return format_double(rec.bounds.t) + ',' + format_double(rec.audit.dH_dt) + ',' +
           format_double(rec.audit.port_power) + ',' + format_double(rec.audit.residual);
}

std::string convergence_csv_header() { return "N,dt,max_error,power_residual_peak"; }

std::string convergence_csv_row(const ConvergenceRow& row) {
    return std::to_string(row.n_elements) + ',' + format_double(row.dt) + ',' +
           format_double(row.max_error) + ',' + format_double(row.power_residual_peak);
}

// ---------------------------------------------------------------------------

namespace {

constexpr double kResidualFdStep = 1e-5;
constexpr double kResidualTol = 1e-6;
const QuadSpec kResidualQuad{8, 8};

json dirac_section(const AppConfig& cfg, const PHSystem& sys, bool& all_pass) {
    DiracCheck check;
    check.n_samples = cfg.dirac.n_samples;
    check.degree = cfg.dirac.degree;
    check.seed = cfg.sim.seed;

    json per_time = json::array();
    double worst = 0.0;
    double worst_rel = 0.0;
    for (double t : cfg.dirac.times) {
        const DiracReport r = verify_dirac(sys, cfg.sim.trajectory, t, check);
        worst = std::max(worst, r.max_abs_pairing);
        worst_rel = std::max(worst_rel, r.max_relative);
        all_pass = all_pass && r.pass;
        per_time.push_back({{"t", r.t},
                            {"max_abs_pairing", r.max_abs_pairing},
                            {"max_relative", r.max_relative},
                            {"max_scale", r.max_scale},
                            {"pass", r.pass}});
    }
    return {{"max_abs_pairing", worst},
            {"max_relative", worst_rel},
            {"tolerance", kDiracTol},
            {"per_time", per_time}};
}

json residual_section(const AppConfig& cfg, const PHSystem& sys, bool& all_pass) {
    const SimConfig& s = cfg.sim;
    const StateHistory history =
        analytic_state_history(s.trajectory, s.solution, s.inductance, s.capacitance);
    json rows = json::array();
    for (double t : cfg.dirac.residual_times) {
        const BoundsSample b = eval_bounds(s.trajectory, t);
        const Field xhat = history(t);
        const Field dxhat = time_derivative(history, t, kResidualFdStep);
        const PowerBalance pb = power_balance_residual(sys, b, xhat, dxhat, kResidualQuad);
        const double H = hamiltonian_hat(sys, xhat, kResidualQuad);
        const ConservationCheck q =
            charge_conservation_residual(sys, s.trajectory, t, history, kResidualFdStep, kResidualQuad);
        const ConservationCheck phi =
            flux_conservation_residual(sys, s.trajectory, t, history, kResidualFdStep, kResidualQuad);
        const bool pass = pb.residual <= kResidualTol * std::max(H, 1.0) &&
                          q.residual <= kResidualTol * std::max(std::abs(q.total), 1.0) &&
                          phi.residual <= kResidualTol * std::max(std::abs(phi.total), 1.0);
        all_pass = all_pass && pass;
        rows.push_back({{"t", t},
                        {"H", H},
                        {"power_lhs", pb.lhs},
                        {"power_rhs", pb.rhs},
                        {"power_residual", pb.residual},
                        {"charge", q.total},
                        {"charge_residual", q.residual},
                        {"flux", phi.total},
                        {"flux_residual", phi.residual},
                        {"pass", pass}});
    }
    return {{"fd_step", kResidualFdStep}, {"tolerance", kResidualTol}, {"per_time", rows}};
}

} // namespace

std::string dirac_report_json(const AppConfig& cfg) {
    const PHSystem sys = cfg.system.build();
    bool all_pass = true;
    json dirac = dirac_section(cfg, sys, all_pass);
    json report = {{"max_abs_pairing", dirac.at("max_abs_pairing")},
                   {"n_samples", cfg.dirac.n_samples},
                   {"seed", cfg.sim.seed},
                   {"trajectory", json::parse(trajectory_to_json(cfg.sim.trajectory))},
                   {"dirac", dirac}};
    if (cfg.system.kind == SystemSpec::Kind::TransmissionLine)
        report["residual_checks"] = residual_section(cfg, sys, all_pass);
    else
        report["residual_checks"] = nullptr;
    report["pass"] = all_pass;
    return report.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

namespace {

struct Options {
    std::string config_path;
    std::string out_dir = ".";
    std::optional<int> n_elements;
    std::optional<double> dt;
    std::optional<double> t_end;
    std::optional<std::uint64_t> seed;
    bool quiet = false;
};

class Outputs {
public:
    explicit Outputs(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
    }

    std::ofstream open(const std::string& name) const {
        std::ofstream f(dir_ / name);
        if (!f) throw ConfigError("cannot write '" + (dir_ / name).string() + "'");
        return f;
    }

    std::string path(const std::string& name) const { return (dir_ / name).string(); }

private:
    fs::path dir_;
};

void report_error(std::ostream& err, const std::string& kind, const std::string& message) {
    const int code = exit_code_for(kind);
    err << json{{"error", kind}, {"message", message}, {"exit_code", code}}.dump() << "\n";
}

AppConfig resolve_config(const Options& opt) {
    AppConfig cfg = opt.config_path.empty() ? AppConfig{} : load_config(opt.config_path);
    if (opt.n_elements) cfg.sim.n_elements = *opt.n_elements;
    if (opt.dt) cfg.sim.dt = *opt.dt;
    if (opt.t_end) cfg.sim.t_end = *opt.t_end;
    if (opt.seed) cfg.sim.seed = *opt.seed;
    return cfg;
}

void require_tl(const AppConfig& cfg, const std::string& what) {
    if (cfg.system.kind != SystemSpec::Kind::TransmissionLine)
        throw UnsupportedClosure(what + " needs the transmission_line system");
}

SimSummary run_simulation(const AppConfig& cfg, std::ofstream* sim, std::ofstream* power) {
    require_tl(cfg, "simulation");
    validate(cfg.sim);
    if (sim) *sim << sim_csv_header(cfg.sim.n_elements) << "\n";
    if (power) *power << power_csv_header() << "\n";
    return simulate(cfg.sim, [&](const SimRecord& rec) {
        if (sim) *sim << sim_csv_row(rec) << "\n";
        if (power) *power << power_csv_row(rec) << "\n";
    });
}

void print_summary(std::ostream& out, const SimSummary& s) {
    out << "steps " << s.steps << ", rows " << s.rows << ", dt " << format_double(s.dt) << "\n"
        << "max voltage error " << format_double(s.max_error) << "\n"
        << "max power residual: moving " << format_double(s.max_residual_moving) << ", static "
        << format_double(s.max_residual_static) << "\n";
}

std::vector<ConvergenceRow> run_convergence(const AppConfig& cfg, std::ofstream& csv) {
    require_tl(cfg, "convergence study");
    const auto rows = convergence_study(cfg.sim, cfg.convergence_n);
    csv << convergence_csv_header() << "\n";
    for (const auto& r : rows) csv << convergence_csv_row(r) << "\n";
    return rows;
}

void print_convergence(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
    for (const auto& r : rows)
        out << "N " << r.n_elements << ": max error " << format_double(r.max_error) << "\n";
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Moving-boundary port-Hamiltonian simulator", "mbph"};
    app.require_subcommand(1);
    Options opt;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", opt.out_dir, "output directory");
        sub->add_option("--n-elements", opt.n_elements, "number of mesh elements");
        sub->add_option("--dt", opt.dt, "time step");
        sub->add_option("--t-end", opt.t_end, "final time");
        sub->add_option("--seed", opt.seed, "random seed");
        sub->add_flag("--quiet", opt.quiet, "no summary on stdout");
    };
    CLI::App* simulate_cmd = app.add_subcommand("simulate", "run the benchmark, write sim.csv");
    CLI::App* dirac_cmd = app.add_subcommand("verify-dirac", "write dirac_report.json");
    CLI::App* power_cmd = app.add_subcommand("power-audit", "run the benchmark, write power.csv");
    CLI::App* converge_cmd = app.add_subcommand("converge", "write convergence.csv");
    CLI::App* demo_cmd =
        app.add_subcommand("demo-paper", "L = C = 1, N = 10, benchmark trajectory, t_end = 15; all outputs");
    for (CLI::App* sub : {simulate_cmd, dirac_cmd, power_cmd, converge_cmd, demo_cmd}) add_common(sub);

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        report_error(err, "UsageError", e.what());
        return kExitValidation;
    }

    try {
        if (*demo_cmd) {
            AppConfig cfg;
            if (opt.seed) cfg.sim.seed = *opt.seed;
            const Outputs outs(opt.out_dir);
            std::ofstream sim = outs.open("sim.csv");
            std::ofstream power = outs.open("power.csv");
            const SimSummary s = run_simulation(cfg, &sim, &power);
            std::ofstream conv = outs.open("convergence.csv");
            const auto rows = run_convergence(cfg, conv);
            std::ofstream report = outs.open("dirac_report.json");
            report << dirac_report_json(cfg);
            if (!opt.quiet) {
                print_summary(out, s);
                print_convergence(out, rows);
                out << "wrote sim.csv, power.csv, convergence.csv, dirac_report.json to "
                    << opt.out_dir << "\n";
            }
            return kExitOk;
        }

        const AppConfig cfg = resolve_config(opt);
        const Outputs outs(opt.out_dir);
        if (*simulate_cmd) {
            std::ofstream sim = outs.open("sim.csv");
            const SimSummary s = run_simulation(cfg, &sim, nullptr);
            if (!opt.quiet) print_summary(out, s);
        } else if (*power_cmd) {
            std::ofstream power = outs.open("power.csv");
            const SimSummary s = run_simulation(cfg, nullptr, &power);
            if (!opt.quiet) print_summary(out, s);
        } else if (*converge_cmd) {
            std::ofstream conv = outs.open("convergence.csv");
            const auto rows = run_convergence(cfg, conv);
            if (!opt.quiet) print_convergence(out, rows);
        } else if (*dirac_cmd) {
            const std::string report = dirac_report_json(cfg);
            outs.open("dirac_report.json") << report;
            if (!opt.quiet) out << report;
        }
        return kExitOk;
    } catch (const Error& e) {
        report_error(err, e.kind(), e.what());
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        report_error(err, "InternalError", e.what());
        return kExitNumeric;
    }
}

} // namespace mbph
