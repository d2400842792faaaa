#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "bjjcat/dynamics.hpp"
#include "bjjcat/observables.hpp"

namespace bjjcat {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One fully deterministic experiment: no randomness enters anywhere, so a
/// given config always produces byte-identical output files.
struct RunConfig {
  int n_atoms = 100;
  double coupling = 1.0;  // J, the unit of energy
  double t_f = 1.0;       // ramp duration in units of 1/J
  long steps = 0;         // steps across the ramp; 0 = default 1e4 * t_f * J
  CdMode cd_mode = CdMode::On;
  int sample_count = 201;        // diagnostics samples over [0, horizon]
  double horizon_factor = 1.0;   // evolve to horizon_factor * t_f under frozen H(t_f)
  Integrator method = Integrator::CrankNicolson;
  double norm_tolerance = 1e-6;  // abort threshold on |norm^2 - 1|
  std::string out_dir;           // empty = compute only, write nothing
  std::string label;             // output file prefix; automatic when empty
};

long resolved_steps(const RunConfig& cfg);
std::string resolved_label(const RunConfig& cfg);

struct RunResult {
  RunConfig config;  // with steps and label resolved
  std::vector<DiagnosticsSample> trace;
  DiagnosticsSample final_sample;
  Eigen::VectorXd tf_distribution;     // populations at t = t_f
  Eigen::VectorXd final_distribution;  // populations at the horizon
  Vector final_state;
  double norm_drift = 0.0;
  long total_steps = 0;
  std::vector<std::string> files;  // paths written, if any
};

/// Ground-state preparation at Gamma(0) = 2J, propagation through the ramp
/// (and the frozen tail when horizon_factor > 1), diagnostics at the sample
/// times, CSV/JSON outputs. Errors from any stage are rethrown with the
/// stage name prefixed.
RunResult run_single(const RunConfig& cfg);

enum class SweepAxis { Duration, Atoms };

struct SweepRow {
  double axis = 0.0;
  CdMode mode = CdMode::On;
  bool ok = false;
  std::string status;  // "ok" or the error message
  DiagnosticsSample final_sample;
  double norm_drift = 0.0;
};

/// One run per (axis value, cd mode), rows ordered by axis then mode. A row
/// failure is recorded in its status and the sweep continues. Rows are
/// independent single-threaded simulations and may execute concurrently.
std::vector<SweepRow> run_sweep(const RunConfig& base, SweepAxis axis,
                                const std::vector<double>& values,
                                const std::vector<CdMode>& modes, int threads = 1);

void write_sweep_csv(const RunConfig& base, SweepAxis axis, const std::vector<SweepRow>& rows,
                     const std::string& path);

/// Schedule tables for plotting: one CSV per particle number with columns
/// s, gamma, gamma_dot, f_infinite_or_NaN, f_finite, omega. The
/// thermodynamic-limit amplitude has a pole at the critical point; those rows
/// carry the NaN sentinel token instead of a number.
std::vector<std::string> write_schedule_tables(const RunConfig& base, int grid_points,
                                               const std::vector<int>& n_list,
                                               const std::string& out_dir);

const char* to_string(CdMode mode);
const char* to_string(Integrator method);
CdMode cd_mode_from_string(const std::string& text);
Integrator integrator_from_string(const std::string& text);

/// Shortest round-trippable decimal form used in every output file
/// (17 significant digits).
std::string format_number(double value);

}  // namespace bjjcat
