#include "hwsim/oracle.hpp"
#include "hwsim/scenario.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

int run_command(const std::string& config_path, const std::string& scenario, long long seed,
                double duration, const std::string& out_dir) {
  std::ostringstream text;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) {
      std::cerr << "error: cannot open config file " << config_path << '\n';
      return 1;
    }
    text << in.rdbuf() << '\n';
  }
  // CLI overrides are appended, so they win over the file.
  if (!scenario.empty()) {
    text << "scenario = " << scenario << '\n';
  }
  if (seed >= 0) {
    text << "seed = " << seed << '\n';
  }
  if (duration > 0.0) {
    text << "duration = " << duration << '\n';
  }

  std::vector<std::string> applied_defaults;
  const hwsim::ScenarioConfig config = hwsim::load_config(text.str(), &applied_defaults);
  for (const std::string& line : applied_defaults) {
    std::cout << "default: " << line << '\n';
  }

  const hwsim::RunResult result = hwsim::run_scenario(config, out_dir);
  std::cout << "steps: " << result.steps << '\n'
            << "vehicles created: " << result.vehicles_created << '\n'
            << "vehicles exited: " << result.vehicles_exited << '\n'
            << "vehicles on road: " << result.vehicles_on_road << '\n'
            << "mean density (veh/km): " << result.mean_density << '\n'
            << "messages sent: " << result.messages_sent << '\n'
            << "deliveries: " << result.deliveries << '\n'
            << "drops: " << result.drops << '\n';
  if (config.scenario == "example5") {
    std::cout << "police stop time: " << result.police_stop_time << '\n'
              << "police stop x: " << result.police_stop_x << '\n'
              << "police stop lane: " << result.police_stop_lane << '\n';
  }
  std::cout << "output written to " << out_dir << '\n';
  return 0;
}

int compare_command(const std::string& dir_a, const std::string& dir_b, const std::string& out) {
  const hwsim::oracle::RunData a = hwsim::oracle::load_run_dir(dir_a);
  const hwsim::oracle::RunData b = hwsim::oracle::load_run_dir(dir_b);
  const hwsim::oracle::ComparisonReport report = hwsim::oracle::compare(a, b);
  std::ofstream file(out);
  if (!file) {
    std::cerr << "error: cannot write " << out << '\n';
    return 1;
  }
  hwsim::oracle::write_report(report, file);
  hwsim::oracle::write_report(report, std::cout);
  return 0;
}

int density_command(const std::string& trace_path, double x1, double x2, int direction,
                    double window, const std::string& out) {
  const auto trace = hwsim::oracle::load_trace(trace_path);
  const auto series = hwsim::oracle::measure_density(trace, x1, x2, direction, window);
  std::ofstream file(out);
  if (!file) {
    std::cerr << "error: cannot write " << out << '\n';
    return 1;
  }
  hwsim::oracle::write_density_csv(series, file);
  std::cout << "wrote " << series.size() << " density points to " << out << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"hwsim - microscopic highway traffic and VANET co-simulator"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scenario;
  long long seed = -1;
  double duration = 0.0;
  std::string out_dir = "out";
  CLI::App* run = app.add_subcommand("run", "run a scenario and write trace/detector/channel files");
  run->add_option("config", config_path, "config file with key = value lines");
  run->add_option("--scenario", scenario, "freeflow or example5");
  run->add_option("--seed", seed, "RNG seed override");
  run->add_option("--duration", duration, "simulated seconds override");
  run->add_option("--out-dir", out_dir, "output directory");

  std::string dir_a, dir_b;
  std::string report_out = "report.txt";
  CLI::App* compare = app.add_subcommand("compare", "compare two run directories");
  compare->add_option("run_a", dir_a, "first run directory")->required();
  compare->add_option("run_b", dir_b, "second run directory")->required();
  compare->add_option("--out", report_out, "report file");

  std::string trace_path;
  double x1 = 0.0, x2 = 500.0, window = 10.0;
  int direction = 1;
  std::string density_out = "density.csv";
  CLI::App* density = app.add_subcommand("density", "vehicles/km over a segment from a trace");
  density->add_option("trace", trace_path, "trace.txt produced by run")->required();
  density->add_option("--x1", x1, "segment start, m");
  density->add_option("--x2", x2, "segment end, m");
  density->add_option("--direction", direction, "+1 or -1");
  density->add_option("--window", window, "averaging window, s");
  density->add_option("--out", density_out, "output csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return run_command(config_path, scenario, seed, duration, out_dir);
    }
    if (compare->parsed()) {
      return compare_command(dir_a, dir_b, report_out);
    }
    if (density->parsed()) {
      return density_command(trace_path, x1, x2, direction, window, density_out);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
