#include "mbph/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "mbph/errors.hpp"

namespace mbph {

using nlohmann::json;

std::vector<double> DiracSettings::default_residual_times() {
    std::vector<double> t;
    for (int k = 0; k < 20; ++k) t.push_back((3.0 + 7.0 * k) / 10.0);
    return t;
}

PHSystem SystemSpec::build() const {
    if (kind == Kind::TransmissionLine) return tl_system(inductance, capacitance);
    return PHSystem::from_matrices(J0, J1, Q);
}

namespace {

void require_object(const json& j, const std::string& where, std::set<std::string> allowed) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

double get_number(const json& j, const std::string& key, const std::string& where, double fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
    return v.get<double>();
}

int get_int(const json& j, const std::string& key, const std::string& where, int fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(where + "." + key + " must be an integer");
    return v.get<int>();
}

std::string get_string(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key) || !j.at(key).is_string())
        throw ConfigError(where + "." + key + " must be a string");
    return j.at(key).get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& key, const std::string& where,
                                std::vector<double> fallback) {
    if (!j.contains(key)) return fallback;
    const json& v = j.at(key);
    if (!v.is_array()) throw ConfigError(where + "." + key + " must be an array of numbers");
    std::vector<double> out;
    for (const json& x : v) {
        if (!x.is_number()) throw ConfigError(where + "." + key + " must be an array of numbers");
        out.push_back(x.get<double>());
    }
    return out;
}

Mat matrix_from_json(const json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) throw ConfigError(where + " must be a non-empty array of rows");
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
    if (cols == 0) throw ConfigError(where + " rows must be non-empty arrays");
    Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        if (!j[r].is_array() || j[r].size() != cols) throw ConfigError(where + " is ragged");
        for (std::size_t c = 0; c < cols; ++c) {
            if (!j[r][c].is_number()) throw ConfigError(where + " entries must be numbers");
            m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = j[r][c].get<double>();
        }
    }
    return m;
}

json matrix_to_json(const Mat& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

json traj_to(const BoundaryTrajectory& traj) {
    const auto& fam = traj.family();
    if (const auto* s = std::get_if<traj::Static>(&fam))
        return {{"family", "static"}, {"a", s->a}, {"b", s->b}};
    if (const auto* l = std::get_if<traj::Linear>(&fam))
        return {{"family", "linear"}, {"a0", l->a0}, {"b0", l->b0}, {"va", l->va}, {"vb", l->vb}};
    if (std::holds_alternative<traj::PaperBenchmark>(fam)) return {{"family", "paper_benchmark"}};
    const auto& pf = std::get<traj::PiecewiseFrozen>(fam);
    return {{"family", "piecewise_frozen"}, {"t_freeze", pf.t_freeze}, {"inner", traj_to(*pf.inner)}};
}

BoundaryTrajectory traj_from(const json& j, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + " must be an object");
    const std::string fam = get_string(j, "family", where);
    try {
        if (fam == "static") {
            require_object(j, where, {"family", "a", "b"});
            return BoundaryTrajectory::static_domain(get_number(j, "a", where, 0.0),
                                                     get_number(j, "b", where, 1.0));
        }
        if (fam == "linear") {
            require_object(j, where, {"family", "a0", "b0", "va", "vb"});
            return BoundaryTrajectory::linear(
                get_number(j, "a0", where, 0.0), get_number(j, "b0", where, 1.0),
                get_number(j, "va", where, 0.0), get_number(j, "vb", where, 0.0));
        }
        if (fam == "paper_benchmark") {
            require_object(j, where, {"family"});
            return BoundaryTrajectory::paper_benchmark();
        }
        if (fam == "piecewise_frozen") {
            require_object(j, where, {"family", "t_freeze", "inner"});
            if (!j.contains("inner")) throw ConfigError(where + ".inner is required");
            if (!j.contains("t_freeze")) throw ConfigError(where + ".t_freeze is required");
            return BoundaryTrajectory::frozen(traj_from(j.at("inner"), where + ".inner"),
                                              get_number(j, "t_freeze", where, 0.0));
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(where + ": " + e.what());
    }
    throw ConfigError("unknown trajectory family '" + fam +
                      "' (expected static, linear, paper_benchmark or piecewise_frozen)");
}

json to_json(const AppConfig& cfg) {
    json sys;
    if (cfg.system.kind == SystemSpec::Kind::TransmissionLine) {
        sys = {{"type", "transmission_line"},
               {"L", cfg.system.inductance},
               {"C", cfg.system.capacitance}};
    } else {
        sys = {{"type", "matrices"},
               {"J0", matrix_to_json(cfg.system.J0)},
               {"J1", matrix_to_json(cfg.system.J1)},
               {"Q", matrix_to_json(cfg.system.Q)}};
    }
    const SimConfig& s = cfg.sim;
    json time = {{"t_end", s.t_end},
                 {"dt", s.dt ? json(*s.dt) : json(nullptr)},
                 {"cfl_fraction", s.cfl_fraction},
                 {"output_interval", s.output_interval}};
    return {{"system", sys},
            {"trajectory", traj_to(s.trajectory)},
            {"solution", to_string(s.solution)},
            {"n_elements", s.n_elements},
            {"time", time},
            {"quadrature", {{"order", s.quad.order}, {"panels", s.quad.panels}}},
            {"seed", s.seed},
            {"dirac",
             {{"times", cfg.dirac.times},
              {"n_samples", cfg.dirac.n_samples},
              {"degree", cfg.dirac.degree},
              {"residual_times", cfg.dirac.residual_times}}},
            {"convergence", {{"n_elements", cfg.convergence_n}}}};
}

AppConfig from_json(const json& j) {
    require_object(j, "config",
                   {"system", "trajectory", "solution", "n_elements", "time", "quadrature", "seed",
                    "dirac", "convergence"});
    AppConfig cfg;
    if (j.contains("system")) {
        const json& s = j.at("system");
        if (!s.is_object()) throw ConfigError("system must be an object");
        const std::string type = s.contains("type") ? get_string(s, "type", "system")
                                                    : std::string("transmission_line");
        if (type == "transmission_line") {
            require_object(s, "system", {"type", "L", "C"});
            cfg.system.kind = SystemSpec::Kind::TransmissionLine;
            cfg.system.inductance = get_number(s, "L", "system", 1.0);
            cfg.system.capacitance = get_number(s, "C", "system", 1.0);
        } else if (type == "matrices") {
            require_object(s, "system", {"type", "J0", "J1", "Q"});
            for (const char* k : {"J0", "J1", "Q"})
                if (!s.contains(k)) throw ConfigError(std::string("system.") + k + " is required");
            cfg.system.kind = SystemSpec::Kind::Matrices;
            cfg.system.J0 = matrix_from_json(s.at("J0"), "system.J0");
            cfg.system.J1 = matrix_from_json(s.at("J1"), "system.J1");
            cfg.system.Q = matrix_from_json(s.at("Q"), "system.Q");
        } else {
            throw ConfigError("unknown system type '" + type +
                              "' (expected transmission_line or matrices)");
        }
    }
    cfg.sim.inductance = cfg.system.inductance;
    cfg.sim.capacitance = cfg.system.capacitance;

    if (j.contains("trajectory")) cfg.sim.trajectory = traj_from(j.at("trajectory"), "trajectory");
    if (j.contains("solution")) cfg.sim.solution = solution_from_string(get_string(j, "solution", "config"));
    cfg.sim.n_elements = get_int(j, "n_elements", "config", cfg.sim.n_elements);

    if (j.contains("time")) {
        const json& t = j.at("time");
        require_object(t, "time", {"t_end", "dt", "cfl_fraction", "output_interval"});
        cfg.sim.t_end = get_number(t, "t_end", "time", cfg.sim.t_end);
        if (t.contains("dt") && !t.at("dt").is_null()) cfg.sim.dt = get_number(t, "dt", "time", 0.0);
        cfg.sim.cfl_fraction = get_number(t, "cfl_fraction", "time", cfg.sim.cfl_fraction);
        cfg.sim.output_interval = get_number(t, "output_interval", "time", cfg.sim.output_interval);
    }
    if (j.contains("quadrature")) {
        const json& q = j.at("quadrature");
        require_object(q, "quadrature", {"order", "panels"});
        cfg.sim.quad.order = get_int(q, "order", "quadrature", cfg.sim.quad.order);
        cfg.sim.quad.panels = get_int(q, "panels", "quadrature", cfg.sim.quad.panels);
    }
    if (j.contains("seed")) {
        const json& s = j.at("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            throw ConfigError("seed must be a non-negative integer");
        cfg.sim.seed = s.get<std::uint64_t>();
    }
    if (j.contains("dirac")) {
        const json& d = j.at("dirac");
        require_object(d, "dirac", {"times", "n_samples", "degree", "residual_times"});
        cfg.dirac.times = get_numbers(d, "times", "dirac", cfg.dirac.times);
        cfg.dirac.n_samples = get_int(d, "n_samples", "dirac", cfg.dirac.n_samples);
        cfg.dirac.degree = get_int(d, "degree", "dirac", cfg.dirac.degree);
        cfg.dirac.residual_times =
            get_numbers(d, "residual_times", "dirac", cfg.dirac.residual_times);
    }
    if (j.contains("convergence")) {
        const json& c = j.at("convergence");
        require_object(c, "convergence", {"n_elements"});
        if (c.contains("n_elements")) {
            cfg.convergence_n.clear();
            for (double v : get_numbers(c, "n_elements", "convergence", {})) {
                if (v != static_cast<int>(v)) throw ConfigError("convergence.n_elements must be integers");
                cfg.convergence_n.push_back(static_cast<int>(v));
            }
        }
    }
    return cfg;
}

} // namespace

AppConfig parse_config(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    try {
        return from_json(j);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

AppConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string serialize_config(const AppConfig& cfg) { return to_json(cfg).dump(2) + "\n"; }

std::string trajectory_to_json(const BoundaryTrajectory& traj) { return traj_to(traj).dump(); }

BoundaryTrajectory trajectory_from_json(const std::string& text) {
    try {
        return traj_from(json::parse(text), "trajectory");
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad trajectory: ") + e.what());
    }
}

} // namespace mbph
