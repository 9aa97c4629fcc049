#pragma once

#include "hwsim/highway.hpp"
#include "hwsim/radio.hpp"
#include "hwsim/trace.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hwsim {

/// Everything a run needs: highway geometry and timing, channel settings,
/// duration, trace sampling, detectors, and the scenario selector with its
/// parameters.
struct ScenarioConfig {
  HighwayConfig highway;
  ChannelConfig channel;

  double duration = 60.0;      // simulated seconds
  double sample_period = 0.1;  // trace sampling period, multiple of delta_t
  std::string scenario = "freeflow";
  std::vector<DetectorDef> detectors;

  // example5 scenario parameters
  double obstacle_x = 500.0;
  double broadcast_period = 5.0; // s between the obstacle's help requests
  double police_desired_velocity = 45.0;
  double police_max_acceleration = 2.5;
  double police_range = 500.0;
};

/// Parses `key = value` lines ('#' starts a comment). Unknown keys and
/// out-of-bounds values are rejected with a message naming the key and the
/// violated bound. Every key left at its default is echoed into
/// `applied_defaults`. The example5 preset installs the two-lane
/// bidirectional roadway before explicit keys are applied, so explicit keys
/// still win.
ScenarioConfig load_config(std::string_view text, std::vector<std::string>* applied_defaults = nullptr);
ScenarioConfig load_config_file(const std::filesystem::path& path,
                                std::vector<std::string>* applied_defaults = nullptr);

struct RunResult {
  long steps = 0;
  int vehicles_created = 0;
  int vehicles_exited = 0;
  int vehicles_on_road = 0;
  double mean_density = 0.0; // veh/km over the whole roadway, all lanes
  long messages_sent = 0;
  long deliveries = 0;
  long drops = 0;
  double police_stop_time = -1.0; // example5: first time the police car stands still
  double police_stop_x = 0.0;
  int police_stop_lane = -1;
};

/// Runs the configured scenario and writes trace.txt, detectors.txt,
/// channel.log, and summary.txt into out_dir. Returns the run summary.
RunResult run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

} // namespace hwsim
