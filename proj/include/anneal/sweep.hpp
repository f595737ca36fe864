#pragma once

#include "anneal/lindblad.hpp"

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace anneal {

inline constexpr const char* kAnnealVersion = "1.0.0";

/// Raised by parse_config; the message carries the offending key path.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SweepConfig {
  ModelParams model;
  std::string schedule = "linear";
  BathParams bath_base{0.0, 10.0, 50.0};  ///< eta is taken from eta_values
  std::vector<double> eta_values;
  std::vector<double> tf_values;
  EvolutionConfig evolution;  ///< t_f is filled in per grid point
  std::filesystem::path out_dir = "out";
  int jobs = 0;  ///< parallel runs; 0 picks the hardware thread count

  Schedule make_schedule() const;
  static SweepConfig defaults();
};

/// Reads the JSON config file. Every key is optional and falls back to the
/// defaults above; unknown keys and constraint violations raise ConfigError
/// with the key path.
SweepConfig parse_config(const std::filesystem::path& file);
SweepConfig parse_config_text(const std::string& text);

/// Compact single-line echo of the effective configuration, written into the
/// CSV provenance block.
std::string config_echo(const SweepConfig& config);

struct SweepRow {
  double eta = 0.0;
  double tf = 0.0;
  double residual_energy = 0.0;
  double ground_population = 0.0;
  double trace_error = 0.0;
  double min_eigenvalue = 0.0;
  long steps = 0;
  std::string status = "ok";

  bool ok() const { return status == "ok"; }
};

struct SweepResult {
  SweepConfig config;
  std::vector<SweepRow> rows;  ///< grid order: eta outer, tf inner
  bool all_ok = true;
};

/// One grid point. Failures are captured in the row status, not thrown.
SweepRow run_point(const SweepConfig& config, double eta, double tf,
                   std::shared_ptr<const LambShiftTable> table);

/// Executes the full (eta x tf) grid, parallel up to `jobs` runs, appending
/// completed rows to <out_dir>/sweep.csv as they finish (crash-safe) and
/// rewriting the file in grid order plus emitting <out_dir>/sweep.svg on
/// success. Failed points produce error rows; they do not stop the sweep.
SweepResult run_sweep(const SweepConfig& config);

inline constexpr const char* kSweepCsvHeader =
    "N,p,Gamma,eta,beta,omega_c,tf,residual_energy,ground_population,"
    "trace_error,min_eigenvalue,steps,status";

std::string format_sweep_row(const SweepConfig& config, const SweepRow& row);

/// Scans the gap, writes <out_dir>/gaps.csv (columns s,gap,e0,e1) and prints
/// the refined minimum to `info`.
GapScan gap_scan_command(const SweepConfig& config, int resolution,
                         std::ostream& info);

/// Writes the sampled trajectory of one run (s,epsilon,ground_pop,trace_err,
/// min_eig).
void write_trajectory_csv(const RunResult& result,
                          const std::filesystem::path& path);

/// Self-contained SVG of epsilon vs t_f, log t_f axis, one series per eta.
/// t_f = 0 rows are skipped (they stay in the CSV). Returns false and warns
/// on an empty result.
bool emit_plot(const SweepResult& result, const std::filesystem::path& path);

/// "%.12g" formatting used for every number written to output files.
std::string format_number(double value);

}  // namespace anneal
