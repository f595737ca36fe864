#include "anneal/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace anneal {

using nlohmann::json;

std::string format_number(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

Schedule SweepConfig::make_schedule() const {
  if (schedule == "linear") return Schedule::linear();
  throw ConfigError("schedule: unknown descriptor '" + schedule +
                    "' (supported: linear)");
}

SweepConfig SweepConfig::defaults() {
  SweepConfig config;
  config.model = ModelParams{};          // N=16, p=3, E=1, Gamma=1
  config.bath_base = {0.0, 10.0, 50.0};  // beta = 10/E, omega_c = 50E
  config.eta_values = {0.0, 1e-4, 1e-3, 1e-2};
  // 13 log-spaced annealing times spanning 1..1e4, preceded by the quench.
  config.tf_values.push_back(0.0);
  for (int i = 0; i <= 12; ++i)
    config.tf_values.push_back(std::pow(10.0, 4.0 * i / 12.0));
  return config;
}

namespace {

const json& require_type(const json& j, const std::string& path,
                         json::value_t type) {
  const bool numeric_ok =
      (type == json::value_t::number_float && j.is_number());
  if (j.type() != type && !numeric_ok)
    throw ConfigError(path + ": expected " + std::string([&] {
                        switch (type) {
                          case json::value_t::number_float: return "number";
                          case json::value_t::number_integer: return "integer";
                          case json::value_t::boolean: return "boolean";
                          case json::value_t::string: return "string";
                          case json::value_t::array: return "array";
                          default: return "value";
                        }
                      }()));
  return j;
}

double get_number(const json& j, const std::string& path) {
  require_type(j, path, json::value_t::number_float);
  return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
  if (!j.is_number_integer())
    throw ConfigError(path + ": expected integer");
  return j.get<int>();
}

bool get_bool(const json& j, const std::string& path) {
  require_type(j, path, json::value_t::boolean);
  return j.get<bool>();
}

std::vector<double> get_number_list(const json& j, const std::string& path) {
  require_type(j, path, json::value_t::array);
  std::vector<double> out;
  for (size_t i = 0; i < j.size(); ++i)
    out.push_back(get_number(j[i], path + "[" + std::to_string(i) + "]"));
  if (out.empty()) throw ConfigError(path + ": list must be non-empty");
  return out;
}

}  // namespace

SweepConfig parse_config_text(const std::string& text) {
  json j;
  try {
    j = text.empty() ? json::object() : json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config: top level must be an object");

  SweepConfig config = SweepConfig::defaults();
  bool explicit_tf = false;
  double tf_min = 1.0, tf_max = 1e4;
  int tf_points = 13;
  bool include_quench = true;
  bool log_grid_requested = false;

  for (const auto& [key, value] : j.items()) {
    if (key == "N")
      config.model.N = get_int(value, key);
    else if (key == "p")
      config.model.p = get_int(value, key);
    else if (key == "E")
      config.model.E = get_number(value, key);
    else if (key == "Gamma")
      config.model.Gamma = get_number(value, key);
    else if (key == "beta")
      config.bath_base.beta = get_number(value, key);
    else if (key == "omega_c")
      config.bath_base.omega_c = get_number(value, key);
    else if (key == "eta_values")
      config.eta_values = get_number_list(value, key);
    else if (key == "tf_values") {
      config.tf_values = get_number_list(value, key);
      explicit_tf = true;
    } else if (key == "tf_min") {
      tf_min = get_number(value, key);
      log_grid_requested = true;
    } else if (key == "tf_max") {
      tf_max = get_number(value, key);
      log_grid_requested = true;
    } else if (key == "tf_points") {
      tf_points = get_int(value, key);
      log_grid_requested = true;
    } else if (key == "include_quench") {
      include_quench = get_bool(value, key);
      log_grid_requested = true;
    } else if (key == "schedule")
      config.schedule = require_type(value, key, json::value_t::string)
                            .get<std::string>();
    else if (key == "lamb_shift")
      config.evolution.lamb_shift_enabled = get_bool(value, key);
    else if (key == "tol_omega")
      config.evolution.tol_omega = get_number(value, key);
    else if (key == "step_mode") {
      const std::string mode =
          require_type(value, key, json::value_t::string).get<std::string>();
      if (mode == "fixed")
        config.evolution.step.adaptive = false;
      else if (mode == "adaptive")
        config.evolution.step.adaptive = true;
      else
        throw ConfigError("step_mode: expected 'fixed' or 'adaptive'");
    } else if (key == "step_h")
      config.evolution.step.h = get_number(value, key);
    else if (key == "lawson_frame")
      config.evolution.step.lawson_frame = get_bool(value, key);
    else if (key == "rel_tol")
      config.evolution.step.rel_tol = get_number(value, key);
    else if (key == "abs_tol")
      config.evolution.step.abs_tol = get_number(value, key);
    else if (key == "record_stride")
      config.evolution.record_stride = get_int(value, key);
    else if (key == "invariant_check_stride")
      config.evolution.invariant_check_stride = get_int(value, key);
    else if (key == "jobs")
      config.jobs = get_int(value, key);
    else if (key == "out_dir")
      config.out_dir = require_type(value, key, json::value_t::string)
                           .get<std::string>();
    else
      throw ConfigError("unknown key: " + key);
  }

  if (explicit_tf && log_grid_requested)
    throw ConfigError(
        "tf_values: cannot be combined with tf_min/tf_max/tf_points");
  if (!explicit_tf && log_grid_requested) {
    if (!(tf_min > 0.0)) throw ConfigError("tf_min: must be > 0");
    if (!(tf_max >= tf_min)) throw ConfigError("tf_max: must be >= tf_min");
    if (tf_points < 1) throw ConfigError("tf_points: must be >= 1");
    config.tf_values.clear();
    if (include_quench) config.tf_values.push_back(0.0);
    for (int i = 0; i < tf_points; ++i) {
      const double x = tf_points == 1
                           ? tf_min
                           : tf_min * std::pow(tf_max / tf_min,
                                               static_cast<double>(i) /
                                                   (tf_points - 1));
      config.tf_values.push_back(x);
    }
  }

  // Constraint validation, reported with key paths.
  try {
    config.model.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("model: ") + e.what());
  }
  try {
    config.bath_base.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("bath: ") + e.what());
  }
  config.make_schedule();  // validates the descriptor
  for (double eta : config.eta_values)
    if (!(eta >= 0.0)) throw ConfigError("eta_values: entries must be >= 0");
  for (double tf : config.tf_values)
    if (!(tf >= 0.0)) throw ConfigError("tf_values: entries must be >= 0");
  if (config.tf_values.empty()) throw ConfigError("tf_values: empty grid");
  if (!(config.evolution.tol_omega > 0.0))
    throw ConfigError("tol_omega: must be > 0");
  if (config.evolution.step.h < 0.0) throw ConfigError("step_h: must be >= 0");
  if (config.evolution.step.adaptive &&
      !(config.evolution.step.rel_tol > 0.0 &&
        config.evolution.step.abs_tol > 0.0))
    throw ConfigError("rel_tol/abs_tol: must be > 0 in adaptive mode");
  if (config.evolution.record_stride < 0)
    throw ConfigError("record_stride: must be >= 0");
  if (config.evolution.invariant_check_stride < 1)
    throw ConfigError("invariant_check_stride: must be >= 1");
  if (config.jobs < 0) throw ConfigError("jobs: must be >= 0");
  return config;
}

SweepConfig parse_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw ConfigError("config: cannot open " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

std::string config_echo(const SweepConfig& config) {
  json j;
  j["N"] = config.model.N;
  j["p"] = config.model.p;
  j["E"] = config.model.E;
  j["Gamma"] = config.model.Gamma;
  j["beta"] = config.bath_base.beta;
  j["omega_c"] = config.bath_base.omega_c;
  j["eta_values"] = config.eta_values;
  j["tf_values"] = config.tf_values;
  j["schedule"] = config.schedule;
  j["lamb_shift"] = config.evolution.lamb_shift_enabled;
  j["step_mode"] = config.evolution.step.adaptive ? "adaptive" : "fixed";
  j["step_h"] = config.evolution.step.h;
  j["lawson_frame"] = config.evolution.step.lawson_frame;
  j["tol_omega"] = config.evolution.tol_omega;
  j["jobs"] = config.jobs;
  return j.dump();
}

std::string format_sweep_row(const SweepConfig& config, const SweepRow& row) {
  std::ostringstream out;
  out << config.model.N << ',' << config.model.p << ','
      << format_number(config.model.Gamma) << ',' << format_number(row.eta)
      << ',' << format_number(config.bath_base.beta) << ','
      << format_number(config.bath_base.omega_c) << ','
      << format_number(row.tf) << ',' << format_number(row.residual_energy)
      << ',' << format_number(row.ground_population) << ','
      << format_number(row.trace_error) << ','
      << format_number(row.min_eigenvalue) << ',' << row.steps << ','
      << row.status;
  return out.str();
}

SweepRow run_point(const SweepConfig& config, double eta, double tf,
                   std::shared_ptr<const LambShiftTable> table) {
  SweepRow row;
  row.eta = eta;
  row.tf = tf;
  try {
    BathParams bath = config.bath_base;
    bath.eta = eta;
    EvolutionConfig evo = config.evolution;
    evo.t_f = tf;
    EvolutionContext ctx(config.model, config.make_schedule(), bath, evo,
                         std::move(table));
    const RunResult result = evolve(ctx);
    row.residual_energy = result.residual_energy;
    row.ground_population = result.ground_population;
    row.trace_error = result.diagnostics.max_trace_error;
    row.min_eigenvalue = result.diagnostics.min_eigenvalue;
    row.steps = result.diagnostics.steps;
    row.status = "ok";
  } catch (const std::exception& e) {
    std::string what = e.what();
    std::replace(what.begin(), what.end(), ',', ';');
    std::replace(what.begin(), what.end(), '\n', ' ');
    row.residual_energy = std::nan("");
    row.ground_population = std::nan("");
    row.trace_error = std::nan("");
    row.min_eigenvalue = std::nan("");
    row.steps = 0;
    row.status = "failed(" + what + ")";
  }
  return row;
}

namespace {

std::string timestamp_utc() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_provenance(std::ostream& out, const SweepConfig& config) {
  out << "# anneal sweep v" << kAnnealVersion << "\n";
  out << "# timestamp: " << timestamp_utc() << "\n";
  out << "# config: " << config_echo(config) << "\n";
}

}  // namespace

SweepResult run_sweep(const SweepConfig& config) {
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  const fs::path csv_path = config.out_dir / "sweep.csv";
  {
    // Fail before any run starts if the output directory is not writable.
    std::ofstream probe(csv_path);
    if (!probe)
      throw std::runtime_error("run_sweep: output directory not writable: " +
                               config.out_dir.string());
  }

  const Schedule sched = config.make_schedule();
  const int n_eta = static_cast<int>(config.eta_values.size());
  const int n_tf = static_cast<int>(config.tf_values.size());
  const int total = n_eta * n_tf;

  // One unit-coupling Lamb-shift table serves the whole grid.
  std::shared_ptr<const LambShiftTable> table;
  const bool any_eta = std::any_of(config.eta_values.begin(),
                                   config.eta_values.end(),
                                   [](double e) { return e > 0.0; });
  if (config.evolution.lamb_shift_enabled && !config.evolution.lamb_shift_exact &&
      any_eta) {
    BathParams base = config.bath_base;
    base.eta = 1.0;
    table = std::make_shared<LambShiftTable>(
        base, EvolutionContext::omega_bound(config.model),
        config.evolution.lamb_table_points, config.evolution.lamb_quad);
  }

  SweepResult result;
  result.config = config;
  result.rows.resize(total);

  std::ofstream journal(csv_path, std::ios::trunc);
  write_provenance(journal, config);
  journal << kSweepCsvHeader << "\n";
  journal.flush();

  int jobs = config.jobs;
  if (jobs <= 0) {
    jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs <= 0) jobs = 1;
  }

  auto work = [&](int idx) {
    const int ie = idx / n_tf;
    const int it = idx % n_tf;
    SweepRow row = run_point(config, config.eta_values[ie],
                             config.tf_values[it], table);
    const std::string line = format_sweep_row(config, row);
#ifdef _OPENMP
#pragma omp critical(anneal_sweep_journal)
#endif
    {
      journal << line << "\n";
      journal.flush();
      result.rows[idx] = std::move(row);
    }
  };

#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(jobs) if (jobs > 1)
  for (int idx = 0; idx < total; ++idx) work(idx);
#else
  for (int idx = 0; idx < total; ++idx) work(idx);
#endif

  result.all_ok = std::all_of(result.rows.begin(), result.rows.end(),
                              [](const SweepRow& r) { return r.ok(); });

  // Rewrite in canonical grid order (atomic replace) now that all rows exist.
  const fs::path tmp_path = csv_path.string() + ".tmp";
  {
    std::ofstream ordered(tmp_path, std::ios::trunc);
    write_provenance(ordered, config);
    ordered << kSweepCsvHeader << "\n";
    for (const SweepRow& row : result.rows)
      ordered << format_sweep_row(config, row) << "\n";
  }
  fs::rename(tmp_path, csv_path);

  emit_plot(result, config.out_dir / "sweep.svg");
  return result;
}

GapScan gap_scan_command(const SweepConfig& config, int resolution,
                         std::ostream& info) {
  const GapScan scan =
      scan_minimal_gap(config.model, config.make_schedule(), resolution);
  namespace fs = std::filesystem;
  fs::create_directories(config.out_dir);
  const fs::path path = config.out_dir / "gaps.csv";
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw std::runtime_error("gap_scan_command: cannot write " + path.string());
  out << "s,gap,e0,e1\n";
  for (size_t i = 0; i < scan.grid.size(); ++i)
    out << format_number(scan.grid[i]) << ',' << format_number(scan.gap[i])
        << ',' << format_number(scan.e0[i]) << ',' << format_number(scan.e1[i])
        << "\n";
  info << "min_gap = " << format_number(scan.min_gap)
       << " at s_min = " << format_number(scan.s_min) << "\n";
  info << "wrote " << path.string() << "\n";
  return scan;
}

void write_trajectory_csv(const RunResult& result,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out)
    throw std::runtime_error("write_trajectory_csv: cannot write " +
                             path.string());
  out << "s,epsilon,ground_pop,trace_err,min_eig\n";
  for (const TrajectoryPoint& pt : result.trajectory)
    out << format_number(pt.s) << ',' << format_number(pt.epsilon) << ','
        << format_number(pt.ground_population) << ','
        << format_number(pt.trace_err) << ',' << format_number(pt.min_eig)
        << "\n";
}

}  // namespace anneal
