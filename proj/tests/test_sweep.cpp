#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "anneal/cli.hpp"
#include "anneal/sweep.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

using namespace anneal;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  const fs::path dir = fs::temp_directory_path() / ("anneal_test_" + tag);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file);
  REQUIRE(in);
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

// drops the volatile provenance timestamp line
std::vector<std::string> stable_lines(const fs::path& file) {
  std::vector<std::string> lines = read_lines(file);
  std::erase_if(lines, [](const std::string& l) {
    return l.rfind("# timestamp:", 0) == 0;
  });
  return lines;
}

int run_cli(std::initializer_list<const char*> args) {
  std::vector<const char*> argv = {"anneal"};
  argv.insert(argv.end(), args.begin(), args.end());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST_CASE("parse_config: empty config yields the section-3 defaults") {
  const SweepConfig config = parse_config_text("");
  CHECK(config.model.N == 16);
  CHECK(config.model.p == 3);
  CHECK(config.model.Gamma == 1.0);
  CHECK(config.model.E == 1.0);
  CHECK(config.bath_base.beta == 10.0);
  CHECK(config.bath_base.omega_c == 50.0);
  CHECK(config.eta_values == std::vector<double>{0.0, 1e-4, 1e-3, 1e-2});
  REQUIRE(config.tf_values.size() == 14);
  CHECK(config.tf_values.front() == 0.0);
  CHECK(config.tf_values[1] == doctest::Approx(1.0));
  CHECK(config.tf_values.back() == doctest::Approx(1e4));
  CHECK(config.evolution.lamb_shift_enabled);
  CHECK(config.schedule == "linear");
  const SweepConfig braces = parse_config_text("{}");
  CHECK(braces.model.N == 16);
}

TEST_CASE("parse_config: violations carry the key path") {
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"p": 1})"),
                       doctest::Contains("p must be >= 2"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"frobnicate": 3})"),
                       doctest::Contains("unknown key: frobnicate"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"N": "sixteen"})"),
                       doctest::Contains("N"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"eta_values": []})"),
                       doctest::Contains("eta_values"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"eta_values": [-0.1]})"),
                       doctest::Contains("eta_values"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"tf_values": [1.0, -2.0]})"),
                       doctest::Contains("tf_values"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text(R"({"schedule": "cubic"})"),
                       doctest::Contains("schedule"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config_text("{this is not json"),
                       doctest::Contains("malformed"), ConfigError);
  CHECK_THROWS_WITH_AS(
      parse_config_text(R"({"tf_values": [1], "tf_points": 5})"),
      doctest::Contains("tf_values"), ConfigError);
}

TEST_CASE("parse_config: explicit keys override defaults") {
  const SweepConfig config = parse_config_text(R"({
    "N": 8, "p": 5, "Gamma": 0.5, "beta": 2.0, "omega_c": 10.0,
    "eta_values": [0, 1e-3], "tf_min": 1.0, "tf_max": 100.0, "tf_points": 3,
    "include_quench": false, "lamb_shift": false, "step_mode": "adaptive",
    "rel_tol": 1e-9, "abs_tol": 1e-11, "jobs": 2, "out_dir": "results"
  })");
  CHECK(config.model.N == 8);
  CHECK(config.model.p == 5);
  CHECK(config.bath_base.beta == 2.0);
  CHECK(config.eta_values.size() == 2);
  REQUIRE(config.tf_values.size() == 3);
  CHECK(config.tf_values[0] == doctest::Approx(1.0));
  CHECK(config.tf_values[1] == doctest::Approx(10.0));
  CHECK(config.tf_values[2] == doctest::Approx(100.0));
  CHECK_FALSE(config.evolution.lamb_shift_enabled);
  CHECK(config.evolution.step.adaptive);
  CHECK(config.jobs == 2);
  CHECK(config.out_dir == fs::path("results"));
}

TEST_CASE("run_sweep: grid product, schema, and incremental CSV") {
  SweepConfig config = parse_config_text(R"({
    "N": 4, "eta_values": [0, 1e-3], "tf_values": [0, 1, 10], "jobs": 1
  })");
  config.out_dir = fresh_dir("sweep_basic");
  const SweepResult result = run_sweep(config);
  CHECK(result.all_ok);
  CHECK(result.rows.size() == 6);  // 2 eta x 3 tf

  const auto lines = read_lines(config.out_dir / "sweep.csv");
  REQUIRE(lines.size() >= 10);  // 3 provenance + header + 6 rows
  int header_at = -1;
  for (size_t i = 0; i < lines.size(); ++i)
    if (lines[i] == kSweepCsvHeader) header_at = static_cast<int>(i);
  REQUIRE(header_at >= 0);
  CHECK(lines.size() - header_at - 1 == 6);

  // rows are in grid order after the final rewrite: eta outer, tf inner
  std::istringstream first(lines[header_at + 1]);
  std::string cell;
  for (int c = 0; c <= 3; ++c) std::getline(first, cell, ',');
  CHECK(cell == "0");  // first eta

  // quench rows report epsilon = E
  for (const SweepRow& row : result.rows)
    if (row.tf == 0.0)
      CHECK(row.residual_energy == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(fs::exists(config.out_dir / "sweep.svg"));
}

TEST_CASE("run_sweep: serial and parallel runs produce identical rows") {
  SweepConfig config = parse_config_text(R"({
    "N": 6, "eta_values": [0, 1e-3], "tf_values": [0, 2, 20], "jobs": 1
  })");
  config.out_dir = fresh_dir("sweep_serial");
  const SweepResult serial = run_sweep(config);

  config.jobs = 4;
  config.out_dir = fresh_dir("sweep_parallel");
  const SweepResult parallel = run_sweep(config);

  REQUIRE(serial.rows.size() == parallel.rows.size());
  for (size_t i = 0; i < serial.rows.size(); ++i) {
    CHECK(format_sweep_row(config, serial.rows[i]) ==
          format_sweep_row(config, parallel.rows[i]));
  }
}

TEST_CASE("run_sweep: single-threaded reruns are byte-identical") {
  SweepConfig config = parse_config_text(R"({
    "N": 4, "eta_values": [1e-3], "tf_values": [0, 1, 5], "jobs": 1
  })");
  config.out_dir = fresh_dir("sweep_det_a");
  run_sweep(config);
  const auto a = stable_lines(config.out_dir / "sweep.csv");
  config.out_dir = fresh_dir("sweep_det_b");
  run_sweep(config);
  const auto b = stable_lines(config.out_dir / "sweep.csv");
  CHECK(a == b);
}

TEST_CASE("run_sweep: a failing point records an error row and continues") {
  SweepConfig config = parse_config_text(R"({
    "N": 4, "eta_values": [0], "tf_values": [0, 3], "jobs": 1,
    "step_h": 3.0
  })");
  // a huge plain step breaks the positivity bound on the longer run
  config.evolution.step.lawson_frame = false;
  config.out_dir = fresh_dir("sweep_fail");
  const SweepResult result = run_sweep(config);
  CHECK_FALSE(result.all_ok);
  int failed = 0;
  for (const SweepRow& row : result.rows)
    if (!row.ok()) {
      ++failed;
      CHECK(row.status.rfind("failed(", 0) == 0);
    }
  CHECK(failed >= 1);
  CHECK(failed < static_cast<int>(result.rows.size()));
}

TEST_CASE("gap_scan_command writes the CSV and summary") {
  SweepConfig config = parse_config_text(R"({"N": 16})");
  config.out_dir = fresh_dir("gapcmd");
  std::ostringstream info;
  const GapScan scan = gap_scan_command(config, 801, info);
  CHECK(scan.min_gap == doctest::Approx(0.465468927).epsilon(1e-5));
  CHECK(info.str().find("min_gap") != std::string::npos);

  const auto lines = read_lines(config.out_dir / "gaps.csv");
  REQUIRE(lines.size() == 802);
  CHECK(lines[0] == "s,gap,e0,e1");
  // first row is s=0 with the driver gap 2 Gamma
  std::istringstream row(lines[1]);
  std::string s_cell, gap_cell;
  std::getline(row, s_cell, ',');
  std::getline(row, gap_cell, ',');
  CHECK(s_cell == "0");
  CHECK(gap_cell == "2");
}

TEST_CASE("emit_plot: series, legend, and the empty case") {
  SweepConfig config = parse_config_text(
      R"({"N": 4, "eta_values": [0, 1e-3], "tf_values": [0, 1, 10], "jobs": 1})");
  config.out_dir = fresh_dir("plot");
  const SweepResult result = run_sweep(config);

  const fs::path svg = config.out_dir / "plot_test.svg";
  CHECK(emit_plot(result, svg));
  std::ifstream in(svg);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string body = buf.str();
  CHECK(body.find("<svg") != std::string::npos);
  CHECK(body.find("eta = 0") != std::string::npos);
  CHECK(body.find("eta = 0.001") != std::string::npos);
  // two series, each drawn as a polyline (tf=0 rows are skipped)
  size_t polylines = 0;
  for (size_t pos = 0; (pos = body.find("<polyline", pos)) != std::string::npos;
       ++pos)
    ++polylines;
  CHECK(polylines == 2);

  SweepResult empty;
  empty.config = config;
  const fs::path none = config.out_dir / "none.svg";
  CHECK_FALSE(emit_plot(empty, none));
  CHECK_FALSE(fs::exists(none));

  // single point: marker only, no line
  SweepResult single;
  single.config = config;
  single.config.eta_values = {1e-3};
  SweepRow row;
  row.eta = 1e-3;
  row.tf = 10.0;
  row.residual_energy = 0.5;
  single.rows.push_back(row);
  const fs::path one = config.out_dir / "one.svg";
  CHECK(emit_plot(single, one));
  std::ifstream oin(one);
  std::stringstream obuf;
  obuf << oin.rdbuf();
  CHECK(obuf.str().find("<polyline") == std::string::npos);
  CHECK(obuf.str().find("<circle") != std::string::npos);
}

TEST_CASE("cli: run, gap, sweep, and exit codes") {
  const fs::path dir = fresh_dir("cli");
  const fs::path config_file = dir / "config.json";
  {
    std::ofstream out(config_file);
    out << R"({"N": 4, "eta_values": [1e-3], "tf_values": [0, 1], "jobs": 1})";
  }
  const std::string config_arg = config_file.string();
  const std::string out_arg = (dir / "out").string();
  const std::string traj_arg = (dir / "traj.csv").string();

  SUBCASE("gap command") {
    CHECK(run_cli({"gap", "--config", config_arg.c_str(), "--out",
                   out_arg.c_str(), "--resolution", "301"}) == 0);
    CHECK(fs::exists(dir / "out" / "gaps.csv"));
  }
  SUBCASE("sweep command") {
    CHECK(run_cli({"sweep", "--config", config_arg.c_str(), "--out",
                   out_arg.c_str(), "--jobs", "1"}) == 0);
    CHECK(fs::exists(dir / "out" / "sweep.csv"));
    CHECK(fs::exists(dir / "out" / "sweep.svg"));
  }
  SUBCASE("run command with trajectory dump") {
    CHECK(run_cli({"run", "--config", config_arg.c_str(), "--eta", "1e-3",
                   "--tf", "2", "--trajectory", traj_arg.c_str()}) == 0);
    const auto lines = read_lines(dir / "traj.csv");
    CHECK(lines[0] == "s,epsilon,ground_pop,trace_err,min_eig");
    CHECK(lines.size() > 2);
  }
  SUBCASE("config errors exit with code 2") {
    const fs::path bad = dir / "bad.json";
    {
      std::ofstream out(bad);
      out << R"({"p": 1})";
    }
    const std::string bad_arg = bad.string();
    CHECK(run_cli({"sweep", "--config", bad_arg.c_str()}) == 2);
    CHECK(run_cli({"gap", "--config", bad_arg.c_str()}) == 2);
  }
  SUBCASE("usage errors exit with code 2") {
    CHECK(run_cli({"run"}) == 2);           // missing --tf
    CHECK(run_cli({"frobnicate"}) == 2);    // unknown subcommand
  }
  SUBCASE("a failing sweep exits with code 1") {
    const fs::path failing = dir / "failing.json";
    {
      std::ofstream out(failing);
      out << R"({"N": 4, "eta_values": [0], "tf_values": [3],
                 "jobs": 1, "step_h": 3.0, "lawson_frame": false})";
    }
    const std::string failing_arg = failing.string();
    CHECK(run_cli({"sweep", "--config", failing_arg.c_str(), "--out",
                   out_arg.c_str()}) == 1);
  }
}

TEST_CASE("format_number uses 12 significant digits") {
  CHECK(format_number(1.0) == "1");
  CHECK(format_number(0.4654689271) == "0.4654689271");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1e4) == "10000");
}
