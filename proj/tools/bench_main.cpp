// Timing comparison between the serial reference paths and the OpenMP ones:
// the gap-scan grid and a small sweep grid. Prints a table; no pass/fail.

#include "anneal/spectral.hpp"
#include "anneal/sweep.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

double now_seconds() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double>(clock::now().time_since_epoch())
      .count();
}

}  // namespace

int main() {
  using namespace anneal;

#ifdef _OPENMP
  const int threads = omp_get_max_threads();
#else
  const int threads = 1;
#endif
  std::printf("anneal bench (threads available: %d)\n\n", threads);

  const ModelParams model{16, 3, 1.0, 1.0};
  const Schedule sched = Schedule::linear();

  {
    const int resolution = 20001;
    double t0 = now_seconds();
    const GapScan serial = scan_minimal_gap(model, sched, resolution, false);
    double t1 = now_seconds();
    const GapScan parallel = scan_minimal_gap(model, sched, resolution, true);
    double t2 = now_seconds();
    std::printf("gap scan, %d points:\n", resolution);
    std::printf("  serial   %8.3f s   (min_gap %.9f)\n", t1 - t0,
                serial.min_gap);
    std::printf("  openmp   %8.3f s   (min_gap %.9f)\n", t2 - t1,
                parallel.min_gap);
    std::printf("  speedup  %8.2fx\n\n", (t1 - t0) / (t2 - t1));
  }

  {
    SweepConfig config = SweepConfig::defaults();
    config.eta_values = {0.0, 1e-3};
    config.tf_values = {1.0, 10.0, 50.0, 100.0};
    config.out_dir = std::filesystem::temp_directory_path() / "anneal_bench";

    config.jobs = 1;
    double t0 = now_seconds();
    run_sweep(config);
    double t1 = now_seconds();
    config.jobs = 0;
    run_sweep(config);
    double t2 = now_seconds();
    std::printf("sweep, %zu runs (N=16, t_f up to 100):\n",
                config.eta_values.size() * config.tf_values.size());
    std::printf("  serial   %8.3f s\n", t1 - t0);
    std::printf("  openmp   %8.3f s\n", t2 - t1);
    std::printf("  speedup  %8.2fx\n", (t1 - t0) / (t2 - t1));
  }
  return 0;
}
