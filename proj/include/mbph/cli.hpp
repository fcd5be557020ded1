#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "mbph/config.hpp"

namespace mbph {

/// Exit statuses of `run_cli`.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNumeric = 2;

/// Maps a library error kind to its exit status.
int exit_code_for(const std::string& kind);

/// `printf("%.17g")`; round-trips every finite double.
std::string format_double(double v);

/// CSV schemas.
///   sim.csv          t,a,b,da,db,H,dH_dt,port_power,residual,max_err,x_1..x_2N,e_1..e_2(N+1)
///   power.csv        t,dH_dt,port_power,residual
///   convergence.csv  N,dt,max_error,power_residual_peak
std::string sim_csv_header(int n_elements);
std::string sim_csv_row(const SimRecord& rec);
std::string power_csv_header();
std::string power_csv_row(const SimRecord& rec);
std::string convergence_csv_header();
std::string convergence_csv_row(const ConvergenceRow& row);

/// Dirac isotropy at every `dirac.times` entry plus, for the transmission
/// line, the power-balance and conservation residuals of the reference
/// solution at `dirac.residual_times`. Deterministic for a fixed seed.
std::string dirac_report_json(const AppConfig& cfg);

/// Entry point behind the `mbph` executable. Errors are reported as one
/// JSON object on `err`: {"error": kind, "message": ..., "exit_code": n}.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace mbph
