#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "bjjcat/runner.hpp"

namespace {

using nlohmann::json;

// Keys shared by every subcommand's config file.
void apply_common_keys(const json& j, bjjcat::RunConfig& cfg, std::vector<std::string>& known) {
  auto take = [&](const char* key, auto&& setter) {
    known.push_back(key);
    if (j.contains(key)) setter(j.at(key));
  };
  take("n_atoms", [&](const json& v) { cfg.n_atoms = v.get<int>(); });
  take("coupling", [&](const json& v) { cfg.coupling = v.get<double>(); });
  take("t_f", [&](const json& v) { cfg.t_f = v.get<double>(); });
  take("steps", [&](const json& v) { cfg.steps = v.get<long>(); });
  take("cd_mode", [&](const json& v) { cfg.cd_mode = bjjcat::cd_mode_from_string(v.get<std::string>()); });
  take("sample_count", [&](const json& v) { cfg.sample_count = v.get<int>(); });
  take("horizon_factor", [&](const json& v) { cfg.horizon_factor = v.get<double>(); });
  take("method", [&](const json& v) { cfg.method = bjjcat::integrator_from_string(v.get<std::string>()); });
  take("norm_tolerance", [&](const json& v) { cfg.norm_tolerance = v.get<double>(); });
  take("out_dir", [&](const json& v) { cfg.out_dir = v.get<std::string>(); });
  take("label", [&](const json& v) { cfg.label = v.get<std::string>(); });
}

json load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw bjjcat::ConfigError("cannot open config file " + path);
  json j;
  is >> j;
  if (!j.is_object()) throw bjjcat::ConfigError("config file must hold a JSON object");
  return j;
}

void reject_unknown_keys(const json& j, const std::vector<std::string>& known, const std::string& path) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw bjjcat::ConfigError("unknown key '" + key + "' in config file " + path);
    }
  }
}

struct CommonFlags {
  std::string config_path;
  int n_atoms = 0;
  double coupling = 0.0;
  double t_f = 0.0;
  long steps = 0;
  std::string cd_mode;
  int sample_count = 0;
  double horizon_factor = 0.0;
  std::string method;
  double norm_tolerance = 0.0;
  std::string out_dir;
  std::string label;
};

void add_common_flags(CLI::App* cmd, CommonFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON config file; flags override its values");
  cmd->add_option("--N", f.n_atoms, "particle number");
  cmd->add_option("--J", f.coupling, "coupling J (energy unit)");
  cmd->add_option("--tf", f.t_f, "ramp duration t_f in units of 1/J");
  cmd->add_option("--steps", f.steps, "integration steps across the ramp (default 1e4 * t_f * J)");
  cmd->add_option("--cd", f.cd_mode, "counter-diabatic mode: off, on or after-critical");
  cmd->add_option("--samples", f.sample_count, "number of diagnostics samples");
  cmd->add_option("--horizon-factor", f.horizon_factor,
                  "evolve to horizon_factor * t_f under the frozen final Hamiltonian");
  cmd->add_option("--method", f.method, "integrator: cn or magnus4");
  cmd->add_option("--norm-tol", f.norm_tolerance, "abort threshold on |norm^2 - 1|");
  cmd->add_option("--out-dir", f.out_dir, "output directory");
  cmd->add_option("--label", f.label, "output file prefix");
}

bjjcat::RunConfig resolve_config(const CLI::App* cmd, const CommonFlags& f,
                                 std::vector<std::string>* extra_known = nullptr,
                                 json* raw_out = nullptr) {
  bjjcat::RunConfig cfg;
  if (!f.config_path.empty()) {
    const json j = load_config(f.config_path);
    std::vector<std::string> known;
    apply_common_keys(j, cfg, known);
    if (extra_known) known.insert(known.end(), extra_known->begin(), extra_known->end());
    reject_unknown_keys(j, known, f.config_path);
    if (raw_out) *raw_out = j;
  }
  if (cmd->count("--N")) cfg.n_atoms = f.n_atoms;
  if (cmd->count("--J")) cfg.coupling = f.coupling;
  if (cmd->count("--tf")) cfg.t_f = f.t_f;
  if (cmd->count("--steps")) cfg.steps = f.steps;
  if (cmd->count("--cd")) cfg.cd_mode = bjjcat::cd_mode_from_string(f.cd_mode);
  if (cmd->count("--samples")) cfg.sample_count = f.sample_count;
  if (cmd->count("--horizon-factor")) cfg.horizon_factor = f.horizon_factor;
  if (cmd->count("--method")) cfg.method = bjjcat::integrator_from_string(f.method);
  if (cmd->count("--norm-tol")) cfg.norm_tolerance = f.norm_tolerance;
  if (cmd->count("--out-dir")) cfg.out_dir = f.out_dir;
  if (cmd->count("--label")) cfg.label = f.label;
  return cfg;
}

std::vector<bjjcat::CdMode> parse_cd_list(const std::vector<std::string>& names) {
  std::vector<bjjcat::CdMode> modes;
  for (const auto& name : names) modes.push_back(bjjcat::cd_mode_from_string(name));
  return modes;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"collective-spin dynamics engine: accelerated adiabatic cat-state generation"};
  app.require_subcommand(1);

  // ---- run ----
  auto* run_cmd = app.add_subcommand("run", "single experiment: prepare, ramp, freeze, diagnose");
  CommonFlags run_flags;
  add_common_flags(run_cmd, run_flags);

  // ---- sweep ----
  auto* sweep_cmd = app.add_subcommand("sweep", "final diagnostics over a t_f or N grid");
  CommonFlags sweep_flags;
  add_common_flags(sweep_cmd, sweep_flags);
  std::vector<double> tf_list, n_list_sweep;
  std::vector<std::string> cd_list;
  int threads = 1;
  std::string sweep_out;
  sweep_cmd->add_option("--tf-list", tf_list, "t_f grid")->delimiter(',');
  sweep_cmd->add_option("--N-list", n_list_sweep, "particle-number grid")->delimiter(',');
  sweep_cmd->add_option("--cd-list", cd_list, "cd modes to compare")->delimiter(',');
  sweep_cmd->add_option("--threads", threads, "rows to run concurrently");
  sweep_cmd->add_option("--out", sweep_out, "sweep CSV path (default <out-dir>/sweep.csv)");

  // ---- schedules ----
  auto* sched_cmd = app.add_subcommand("schedules", "export ramp and counter-diabatic schedule tables");
  CommonFlags sched_flags;
  add_common_flags(sched_cmd, sched_flags);
  int grid = 1001;
  std::vector<int> n_list_sched;
  sched_cmd->add_option("--grid", grid, "number of s grid points (odd keeps the critical point on the grid)");
  sched_cmd->add_option("--N-list", n_list_sched, "particle numbers to tabulate")->delimiter(',');

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) {
      bjjcat::RunConfig cfg = resolve_config(run_cmd, run_flags);
      if (cfg.out_dir.empty()) cfg.out_dir = ".";
      const bjjcat::RunResult result = bjjcat::run_single(cfg);
      for (const auto& file : result.files) std::cout << "wrote " << file << "\n";
      std::cout << "norm_drift " << bjjcat::format_number(result.norm_drift) << "\n";
      return 0;
    }

    if (*sweep_cmd) {
      std::vector<std::string> extra = {"tf_list", "n_list", "cd_list", "threads", "out"};
      json raw;
      bjjcat::RunConfig base = resolve_config(sweep_cmd, sweep_flags, &extra, &raw);
      if (!raw.is_null()) {
        if (raw.contains("tf_list") && tf_list.empty()) tf_list = raw["tf_list"].get<std::vector<double>>();
        if (raw.contains("n_list") && n_list_sweep.empty())
          n_list_sweep = raw["n_list"].get<std::vector<double>>();
        if (raw.contains("cd_list") && cd_list.empty())
          cd_list = raw["cd_list"].get<std::vector<std::string>>();
        if (raw.contains("threads") && !sweep_cmd->count("--threads")) threads = raw["threads"].get<int>();
        if (raw.contains("out") && sweep_out.empty()) sweep_out = raw["out"].get<std::string>();
      }
      if (tf_list.empty() == n_list_sweep.empty()) {
        throw bjjcat::ConfigError("sweep needs exactly one axis: --tf-list or --N-list");
      }
      if (cd_list.empty()) throw bjjcat::ConfigError("sweep needs at least one cd mode (--cd-list)");
      const auto axis = tf_list.empty() ? bjjcat::SweepAxis::Atoms : bjjcat::SweepAxis::Duration;
      const auto& values = tf_list.empty() ? n_list_sweep : tf_list;
      const auto modes = parse_cd_list(cd_list);

      const auto rows = bjjcat::run_sweep(base, axis, values, modes, threads);
      if (sweep_out.empty()) {
        const std::string dir = base.out_dir.empty() ? "." : base.out_dir;
        sweep_out = dir + "/sweep.csv";
      }
      bjjcat::write_sweep_csv(base, axis, rows, sweep_out);
      std::cout << "wrote " << sweep_out << "\n";
      bool all_ok = true;
      for (const auto& row : rows) {
        if (!row.ok) {
          all_ok = false;
          std::cerr << "row (" << bjjcat::format_number(row.axis) << ", " << bjjcat::to_string(row.mode)
                    << ") failed: " << row.status << "\n";
        }
      }
      return all_ok ? 0 : 1;
    }

    if (*sched_cmd) {
      std::vector<std::string> extra = {"grid", "n_list"};
      json raw;
      bjjcat::RunConfig base = resolve_config(sched_cmd, sched_flags, &extra, &raw);
      if (!raw.is_null()) {
        if (raw.contains("grid") && !sched_cmd->count("--grid")) grid = raw["grid"].get<int>();
        if (raw.contains("n_list") && n_list_sched.empty())
          n_list_sched = raw["n_list"].get<std::vector<int>>();
      }
      if (n_list_sched.empty()) n_list_sched = {100, 500, 1000};
      const std::string dir = base.out_dir.empty() ? "." : base.out_dir;
      for (const auto& file : bjjcat::write_schedule_tables(base, grid, n_list_sched, dir)) {
        std::cout << "wrote " << file << "\n";
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
