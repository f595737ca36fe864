#include "anneal/cli.hpp"

#include "anneal/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

namespace anneal {

namespace {

SweepConfig load_config(const std::string& config_path) {
  return config_path.empty() ? SweepConfig::defaults()
                             : parse_config(config_path);
}

void warn_if_degenerate(const SweepConfig& config) {
  if (config.model.degenerate_target())
    std::cerr << "warning: p is even; the target ground state is two-fold "
                 "degenerate and the residual energy does not identify a "
                 "unique ferromagnetic state\n";
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              int jobs, bool no_lamb_shift) {
  SweepConfig config = load_config(config_path);
  if (!out_dir.empty()) config.out_dir = out_dir;
  if (jobs >= 0) config.jobs = jobs;
  if (no_lamb_shift) config.evolution.lamb_shift_enabled = false;
  warn_if_degenerate(config);

  const SweepResult result = run_sweep(config);
  int failed = 0;
  for (const SweepRow& row : result.rows)
    if (!row.ok()) ++failed;
  std::cout << "sweep: " << result.rows.size() - failed << "/"
            << result.rows.size() << " runs ok, results in "
            << config.out_dir.string() << "\n";
  if (failed > 0)
    std::cerr << "sweep: " << failed << " run(s) failed; see status column\n";
  return result.all_ok ? 0 : 1;
}

int cmd_gap(const std::string& config_path, const std::string& out_dir,
            int resolution) {
  SweepConfig config = load_config(config_path);
  if (!out_dir.empty()) config.out_dir = out_dir;
  warn_if_degenerate(config);
  gap_scan_command(config, resolution, std::cout);
  return 0;
}

int cmd_run(const std::string& config_path, double eta, double tf,
            const std::string& trajectory_path, bool no_lamb_shift) {
  SweepConfig config = load_config(config_path);
  if (no_lamb_shift) config.evolution.lamb_shift_enabled = false;
  warn_if_degenerate(config);

  BathParams bath = config.bath_base;
  bath.eta = eta;
  bath.validate();
  EvolutionConfig evo = config.evolution;
  evo.t_f = tf;
  if (!trajectory_path.empty() && evo.record_stride <= 0) {
    const double h = evo.step.h > 0.0
                         ? evo.step.h
                         : std::min(0.025 / config.model.E, tf / 2000.0);
    const long n =
        tf > 0.0 ? static_cast<long>(std::ceil(tf / h - 1e-12)) : 1;
    evo.record_stride = static_cast<int>(std::max<long>(1, n / 2000));
  }

  const RunResult result =
      evolve(config.model, config.make_schedule(), bath, evo);
  std::cout << "residual_energy = " << format_number(result.residual_energy)
            << "\n";
  std::cout << "ground_population = "
            << format_number(result.ground_population) << "\n";
  std::cout << "steps = " << result.diagnostics.steps
            << ", rhs_evaluations = " << result.diagnostics.rhs_evaluations
            << "\n";
  std::cout << "max_trace_error = "
            << format_number(result.diagnostics.max_trace_error)
            << ", min_eigenvalue = "
            << format_number(result.diagnostics.min_eigenvalue)
            << ", hermiticity_drift = "
            << format_number(result.diagnostics.max_hermiticity_drift) << "\n";
  std::cout << "wall_seconds = "
            << format_number(result.diagnostics.wall_seconds) << "\n";
  if (!trajectory_path.empty()) {
    write_trajectory_csv(result, trajectory_path);
    std::cout << "wrote " << trajectory_path << "\n";
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"Dissipative quantum annealing of the p-spin model in the "
               "collective-spin sector"};
  app.set_version_flag("--version", std::string("anneal ") + kAnnealVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir, trajectory_path;
  int jobs = -1;
  bool no_lamb_shift = false;
  int resolution = 2001;
  double eta = 0.0, tf = 0.0;

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Run the (eta x t_f) grid and write sweep.csv / sweep.svg");
  sweep->add_option("--config", config_path, "JSON config file");
  sweep->add_option("--out", out_dir, "output directory (default from config)");
  sweep->add_option("--jobs", jobs, "parallel runs (0 = hardware threads)");
  sweep->add_flag("--no-lamb-shift", no_lamb_shift,
                  "drop H_LS from the generator");

  CLI::App* gap = app.add_subcommand(
      "gap", "Scan the spectral gap and write gaps.csv");
  gap->add_option("--config", config_path, "JSON config file");
  gap->add_option("--out", out_dir, "output directory (default from config)");
  gap->add_option("--resolution", resolution, "coarse grid points")
      ->check(CLI::Range(3, 100000000));

  CLI::App* run = app.add_subcommand("run", "Run a single annealing instance");
  run->add_option("--config", config_path, "JSON config file");
  run->add_option("--eta", eta, "bath coupling strength")
      ->check(CLI::NonNegativeNumber);
  run->add_option("--tf", tf, "annealing time in 1/E")
      ->check(CLI::NonNegativeNumber)
      ->required();
  run->add_option("--trajectory", trajectory_path,
                  "write the sampled trajectory CSV here");
  run->add_flag("--no-lamb-shift", no_lamb_shift,
                "drop H_LS from the generator");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (sweep->parsed())
      return cmd_sweep(config_path, out_dir, jobs, no_lamb_shift);
    if (gap->parsed()) return cmd_gap(config_path, out_dir, resolution);
    if (run->parsed())
      return cmd_run(config_path, eta, tf, trajectory_path, no_lamb_shift);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace anneal
