#include "bjjcat/runner.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "bjjcat/spectrum.hpp"

namespace bjjcat {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void rethrow_with_stage(const char* stage, const std::exception& e) {
  throw std::runtime_error(std::string(stage) + ": " + e.what());
}

void validate(const RunConfig& cfg) {
  if (cfg.n_atoms < 2) throw ConfigError("n_atoms must be >= 2");
  if (!(cfg.coupling > 0.0)) throw ConfigError("coupling J must be positive");
  if (!(cfg.t_f > 0.0)) throw ConfigError("t_f must be positive");
  if (cfg.steps < 0) throw ConfigError("steps must be non-negative (0 selects the default)");
  if (cfg.sample_count < 2) throw ConfigError("sample_count must be >= 2");
  if (!(cfg.horizon_factor >= 1.0)) throw ConfigError("horizon_factor must be >= 1");
  if (!(cfg.norm_tolerance > 0.0)) throw ConfigError("norm_tolerance must be positive");
}

void echo_config(std::ostream& os, const RunConfig& cfg) {
  os << "# n_atoms = " << cfg.n_atoms << "\n";
  os << "# coupling = " << format_number(cfg.coupling) << "\n";
  os << "# t_f = " << format_number(cfg.t_f) << "\n";
  os << "# steps = " << resolved_steps(cfg) << "\n";
  os << "# cd_mode = " << to_string(cfg.cd_mode) << "\n";
  os << "# sample_count = " << cfg.sample_count << "\n";
  os << "# horizon_factor = " << format_number(cfg.horizon_factor) << "\n";
  os << "# method = " << to_string(cfg.method) << "\n";
  os << "# norm_tolerance = " << format_number(cfg.norm_tolerance) << "\n";
}

void write_distribution(const std::string& path, const RunConfig& cfg, double at_time,
                        const Eigen::VectorXd& p) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << "# population distribution |<m|psi>|^2 at t = " << format_number(at_time) << "\n";
  echo_config(os, cfg);
  os << "m,p\n";
  const double s = 0.5 * (p.size() - 1);
  for (int i = 0; i < p.size(); ++i) {
    os << format_number(static_cast<double>(i) - s) << "," << format_number(p[i]) << "\n";
  }
}

nlohmann::ordered_json config_json(const RunConfig& cfg) {
  nlohmann::ordered_json j;
  j["n_atoms"] = cfg.n_atoms;
  j["coupling"] = cfg.coupling;
  j["t_f"] = cfg.t_f;
  j["steps"] = resolved_steps(cfg);
  j["cd_mode"] = to_string(cfg.cd_mode);
  j["sample_count"] = cfg.sample_count;
  j["horizon_factor"] = cfg.horizon_factor;
  j["method"] = to_string(cfg.method);
  j["norm_tolerance"] = cfg.norm_tolerance;
  return j;
}

}  // namespace

long resolved_steps(const RunConfig& cfg) {
  if (cfg.steps > 0) return cfg.steps;
  return std::max<long>(1, std::llround(std::ceil(1e4 * cfg.t_f * cfg.coupling)));
}

std::string resolved_label(const RunConfig& cfg) {
  if (!cfg.label.empty()) return cfg.label;
  std::ostringstream os;
  os << "run_N" << cfg.n_atoms << "_tf" << format_number(cfg.t_f) << "_cd" << to_string(cfg.cd_mode);
  std::string label = os.str();
  std::replace(label.begin(), label.end(), '.', 'p');
  return label;
}

RunResult run_single(const RunConfig& cfg) {
  validate(cfg);
  RunResult result;
  result.config = cfg;
  result.config.steps = resolved_steps(cfg);
  result.config.label = resolved_label(cfg);

  const long ramp_steps = result.config.steps;
  const long total_steps = std::llround(std::ceil(ramp_steps * cfg.horizon_factor));
  const double horizon = cfg.horizon_factor * cfg.t_f;
  const double dt = horizon / static_cast<double>(total_steps);
  result.total_steps = total_steps;

  Assembly assembly = [&] {
    try {
      return make_assembly(cfg.n_atoms, RampSpec::polynomial(cfg.coupling, cfg.t_f));
    } catch (const std::exception& e) {
      rethrow_with_stage("hamiltonian assembly", e);
    }
  }();

  Vector psi0;
  try {
    psi0 = ground_state(hamiltonian(assembly, 0.0, CdMode::Off));
  } catch (const std::exception& e) {
    rethrow_with_stage("ground-state preparation", e);
  }

  // Sample step indices: uniform over [0, horizon] plus t_f and the horizon,
  // all on the step lattice so recorded times are exact.
  std::set<long> index_set;
  for (int i = 0; i < cfg.sample_count; ++i) {
    index_set.insert(std::llround(static_cast<double>(total_steps) * i / (cfg.sample_count - 1)));
  }
  index_set.insert(ramp_steps);
  index_set.insert(total_steps);
  std::vector<double> t_grid;
  t_grid.reserve(index_set.size());
  for (long idx : index_set) t_grid.push_back(idx * dt);

  PropagationResult prop;
  try {
    PropagateOptions options;
    options.method = cfg.method;
    options.norm_tolerance = cfg.norm_tolerance;
    prop = propagate(psi0, assembly, t_grid, total_steps, cfg.cd_mode, options);
  } catch (const std::exception& e) {
    rethrow_with_stage("propagation", e);
  }
  result.norm_drift = prop.norm_drift;

  try {
    const SpinOperator h_final = hamiltonian(assembly, cfg.t_f, cfg.cd_mode);
    double cached_s = -1.0;
    GroundSubspace cached_sub;
    result.trace.reserve(prop.times.size());
    for (size_t i = 0; i < prop.times.size(); ++i) {
      const double t = prop.times[i];
      const Vector& psi = prop.states[i];
      const double s_clamped = std::min(t / cfg.t_f, 1.0);
      if (s_clamped != cached_s) {
        const SpinOperator h0 = hamiltonian(assembly, std::min(t, cfg.t_f), CdMode::Off);
        cached_sub = ground_subspace(h0, assembly.schedule.field(s_clamped), cfg.coupling);
        cached_s = s_clamped;
      }
      DiagnosticsSample row;
      row.t = t;
      row.s = t / cfg.t_f;
      row.fidelity = subspace_fidelity(psi, cached_sub);
      row.energy = hamiltonian(assembly, t, cfg.cd_mode).expectation(psi);
      row.residual_energy = residual_energy(psi, h_final, cfg.coupling, cfg.n_atoms);
      row.order_param = order_parameter(psi, cfg.n_atoms);
      row.m_inc = incomplete_magnetization(psi, cfg.n_atoms);
      row.qfi = quantum_fisher_information(psi);
      result.trace.push_back(row);

      if (std::llround(t / dt) == ramp_steps) result.tf_distribution = populations(psi);
    }
    result.final_sample = result.trace.back();
    result.final_state = prop.states.back();
    result.final_distribution = populations(result.final_state);
  } catch (const std::exception& e) {
    rethrow_with_stage("diagnostics", e);
  }

  if (!cfg.out_dir.empty()) {
    try {
      fs::create_directories(cfg.out_dir);
      const std::string base = (fs::path(cfg.out_dir) / result.config.label).string();

      const std::string trace_path = base + "_trace.csv";
      {
        std::ofstream os(trace_path);
        if (!os) throw std::runtime_error("cannot open " + trace_path + " for writing");
        os << "# diagnostics trace\n";
        echo_config(os, cfg);
        os << "# norm_drift = " << format_number(result.norm_drift) << "\n";
        os << "t,s,fidelity,energy,residual_energy,order_param,m_inc,qfi\n";
        for (const auto& row : result.trace) {
          os << format_number(row.t) << "," << format_number(row.s) << ","
             << format_number(row.fidelity) << "," << format_number(row.energy) << ","
             << format_number(row.residual_energy) << "," << format_number(row.order_param) << ","
             << format_number(row.m_inc) << "," << format_number(row.qfi) << "\n";
        }
      }
      result.files.push_back(trace_path);

      const std::string dist_tf = base + "_dist_tf.csv";
      write_distribution(dist_tf, cfg, cfg.t_f, result.tf_distribution);
      result.files.push_back(dist_tf);
      if (cfg.horizon_factor > 1.0) {
        const std::string dist_final = base + "_dist_final.csv";
        write_distribution(dist_final, cfg, horizon, result.final_distribution);
        result.files.push_back(dist_final);
      }

      const std::string summary_path = base + "_summary.json";
      {
        const double n = cfg.n_atoms;
        nlohmann::ordered_json j;
        j["config"] = config_json(cfg);
        j["total_steps"] = result.total_steps;
        j["norm_drift"] = result.norm_drift;
        j["ground_state_energy"] = -0.5 * cfg.coupling * n;
        nlohmann::ordered_json fin;
        fin["t"] = result.final_sample.t;
        fin["s"] = result.final_sample.s;
        fin["fidelity"] = result.final_sample.fidelity;
        fin["energy"] = result.final_sample.energy;
        fin["residual_energy"] = result.final_sample.residual_energy;
        fin["order_param"] = result.final_sample.order_param;
        fin["m_inc"] = result.final_sample.m_inc;
        fin["qfi"] = result.final_sample.qfi;
        j["final"] = fin;
        // metrology reference lines for plots: standard quantum limit N,
        // maximally spin-squeezed Dicke state N^2/2 + N, Heisenberg limit N^2
        j["qfi_standard_quantum_limit"] = n;
        j["qfi_dicke_reference"] = 0.5 * n * n + n;
        j["qfi_heisenberg_limit"] = n * n;
        j["qfi_certifies_entanglement"] = result.final_sample.qfi > n;
        j["files"] = result.files;
        std::ofstream os(summary_path);
        if (!os) throw std::runtime_error("cannot open " + summary_path + " for writing");
        os << j.dump(2) << "\n";
      }
      result.files.push_back(summary_path);
    } catch (const std::exception& e) {
      rethrow_with_stage("output", e);
    }
  }
  return result;
}

std::vector<SweepRow> run_sweep(const RunConfig& base, SweepAxis axis,
                                const std::vector<double>& values,
                                const std::vector<CdMode>& modes, int threads) {
  if (values.empty()) throw ConfigError("sweep axis must not be empty");
  if (modes.empty()) throw ConfigError("sweep needs at least one cd mode");

  std::vector<SweepRow> rows(values.size() * modes.size());
  auto work = [&](size_t row_index) {
    SweepRow& row = rows[row_index];
    row.axis = values[row_index / modes.size()];
    row.mode = modes[row_index % modes.size()];
    RunConfig cfg = base;
    cfg.out_dir.clear();
    cfg.cd_mode = row.mode;
    cfg.sample_count = 2;  // endpoints only; sweeps keep final diagnostics
    if (axis == SweepAxis::Duration) {
      cfg.t_f = row.axis;
    } else {
      const double n = row.axis;
      if (n != std::floor(n)) {
        row.status = "n_atoms axis value is not an integer";
        return;
      }
      cfg.n_atoms = static_cast<int>(n);
    }
    try {
      RunResult r = run_single(cfg);
      row.final_sample = r.final_sample;
      row.norm_drift = r.norm_drift;
      row.ok = true;
      row.status = "ok";
    } catch (const std::exception& e) {
      row.ok = false;
      row.status = e.what();
    }
  };

  const int nthreads = std::max(1, threads);
  if (nthreads == 1 || rows.size() <= 1) {
    for (size_t i = 0; i < rows.size(); ++i) work(i);
  } else {
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < std::min<size_t>(nthreads, rows.size()); ++t) {
      pool.emplace_back([&] {
        for (size_t i = next.fetch_add(1); i < rows.size(); i = next.fetch_add(1)) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }
  return rows;
}

void write_sweep_csv(const RunConfig& base, SweepAxis axis, const std::vector<SweepRow>& rows,
                     const std::string& path) {
  fs::create_directories(fs::path(path).parent_path().empty() ? "." : fs::path(path).parent_path().string());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  const char* axis_name = axis == SweepAxis::Duration ? "t_f" : "n_atoms";
  os << "# sweep over " << axis_name << "\n";
  echo_config(os, base);
  os << axis_name << ",cd_mode,fidelity,residual_energy,m_inc,qfi,norm_drift,status\n";
  for (const auto& row : rows) {
    os << format_number(row.axis) << "," << to_string(row.mode) << ","
       << format_number(row.final_sample.fidelity) << ","
       << format_number(row.final_sample.residual_energy) << ","
       << format_number(row.final_sample.m_inc) << "," << format_number(row.final_sample.qfi) << ","
       << format_number(row.norm_drift) << ",";
    std::string status = row.status;
    std::replace(status.begin(), status.end(), ',', ';');
    os << status << "\n";
  }
}

std::vector<std::string> write_schedule_tables(const RunConfig& base, int grid_points,
                                               const std::vector<int>& n_list,
                                               const std::string& out_dir) {
  if (grid_points < 2) throw ConfigError("schedule grid needs at least 2 points");
  if (n_list.empty()) throw ConfigError("schedule export needs at least one particle number");
  const RampSpec ramp = RampSpec::polynomial(base.coupling, base.t_f);
  fs::create_directories(out_dir);
  std::vector<std::string> files;
  for (int n : n_list) {
    if (n < 2) throw ConfigError("schedule export needs n_atoms >= 2");
    std::ostringstream name;
    name << "schedules_N" << n << ".csv";
    const std::string path = (fs::path(out_dir) / name.str()).string();
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    os << "# counter-diabatic schedule table, N = " << n << "\n";
    os << "# coupling = " << format_number(base.coupling) << "\n";
    os << "# t_f = " << format_number(base.t_f) << "\n";
    os << "# grid = " << grid_points << "\n";
    os << "# f_infinite_or_NaN: NaN marks the thermodynamic-limit pole at the critical point\n";
    os << "s,gamma,gamma_dot,f_infinite_or_NaN,f_finite,omega\n";
    for (int i = 0; i < grid_points; ++i) {
      const double s = static_cast<double>(i) / (grid_points - 1);
      const double g = ramp.field(s);
      os << format_number(s) << "," << format_number(g) << "," << format_number(ramp.field_rate(s))
         << ",";
      try {
        os << format_number(cd_infinite(s, ramp));
      } catch (const CriticalPointPole&) {
        os << "NaN";
      }
      os << "," << format_number(cd_finite(s, ramp, n)) << ","
         << format_number(frequency_finite(g, base.coupling, n)) << "\n";
    }
    files.push_back(path);
  }
  return files;
}

const char* to_string(CdMode mode) {
  switch (mode) {
    case CdMode::Off:
      return "off";
    case CdMode::On:
      return "on";
    case CdMode::OnAfterCritical:
      return "after-critical";
  }
  return "?";
}

const char* to_string(Integrator method) {
  return method == Integrator::CrankNicolson ? "cn" : "magnus4";
}

CdMode cd_mode_from_string(const std::string& text) {
  if (text == "off") return CdMode::Off;
  if (text == "on") return CdMode::On;
  if (text == "after-critical" || text == "on_after_critical") return CdMode::OnAfterCritical;
  throw ConfigError("unknown cd mode '" + text + "' (expected off, on or after-critical)");
}

Integrator integrator_from_string(const std::string& text) {
  if (text == "cn" || text == "crank-nicolson") return Integrator::CrankNicolson;
  if (text == "magnus4") return Integrator::Magnus4;
  throw ConfigError("unknown integrator '" + text + "' (expected cn or magnus4)");
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace bjjcat
