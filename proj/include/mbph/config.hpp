#pragma once

#include <string>
#include <vector>

#include "mbph/timeloop.hpp"

namespace mbph {

/// Either the transmission line (L, C) or explicit matrices.
struct SystemSpec {
    enum class Kind { TransmissionLine, Matrices };
    Kind kind = Kind::TransmissionLine;
    double inductance = 1.0;
    double capacitance = 1.0;
    Mat J0;
    Mat J1;
    Mat Q;

    /// Validates and builds the system. Throws ParameterError.
    PHSystem build() const;
};

struct DiracSettings {
    std::vector<double> times{0.0, 2.0, 4.0, 6.0, 7.5, 10.0};
    int n_samples = 100;
    int degree = 4;
    /// Times for the power-balance and conservation checks. Keep them off
    /// trajectory kinks: the central difference straddles the jump.
    std::vector<double> residual_times = default_residual_times();

    static std::vector<double> default_residual_times();
};

/// Everything one config file describes. The seed lives in `sim.seed`.
struct AppConfig {
    SystemSpec system;
    SimConfig sim;
    DiracSettings dirac;
    std::vector<int> convergence_n{10, 20, 40};
};

/// Parses JSON text (comments allowed). Unknown keys and malformed values
/// raise ConfigError; physical validation is left to the consumers.
AppConfig parse_config(const std::string& text);
AppConfig load_config(const std::string& path);
/// Writes every field explicitly; parse_config(serialize_config(c)) == c.
std::string serialize_config(const AppConfig& cfg);

std::string trajectory_to_json(const BoundaryTrajectory& traj);
BoundaryTrajectory trajectory_from_json(const std::string& text);

} // namespace mbph
