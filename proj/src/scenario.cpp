#include "hwsim/scenario.hpp"

#include "hwsim/lane_change.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace hwsim {

namespace {

std::string trim(std::string_view s) {
  const auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) {
    return {};
  }
  const auto end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return parsed;
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "': cannot parse '" + value + "' as a number");
  }
}

int parse_int(const std::string& key, const std::string& value) {
  const double d = parse_double(key, value);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d) {
    throw std::invalid_argument("key '" + key + "': expected an integer, got '" + value + "'");
  }
  return i;
}

std::uint64_t parse_seed(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const unsigned long long parsed = std::stoull(value, &used);
    if (used != value.size()) {
      throw std::invalid_argument("trailing characters");
    }
    return parsed;
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "': cannot parse '" + value +
                                "' as a non-negative integer");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") {
    return true;
  }
  if (value == "false" || value == "0") {
    return false;
  }
  throw std::invalid_argument("key '" + key + "': expected true/false, got '" + value + "'");
}

void apply_example5_preset(ScenarioConfig& config) {
  config.highway.length = 1000.0;
  config.highway.lanes_per_direction = 2;
  config.highway.bidirectional = true;
  config.highway.lane_width = 5.0;
  config.highway.median_gap = 5.0;
  config.highway.injection_mix = 0.8;
  config.highway.min_gap = 10.0;
  config.highway.auto_injection = true;
  config.duration = 180.0;
}

/// Event handlers for the built-in breakdown scenario: a broken car blocking
/// the rightmost eastbound lane at obstacle_x asks for help over the radio
/// every broadcast_period seconds; a fast police car with an extended
/// transmitter replies to each request and pulls up next to the wreck, where
/// it stops and stays. Everything runs through the public hook API.
class Example5Controller {
public:
  Example5Controller(const ScenarioConfig& config, Channel& channel)
      : config_(config), channel_(channel) {}

  bool init_vehicle(Highway& highway, int& vehicle_id) {
    highway_ = &highway;
    obstacle_id_ = vehicle_id++;
    highway.add_vehicle(make_obstacle(obstacle_id_, config_.obstacle_x, 0, 1));

    police_id_ = vehicle_id++;
    VehicleProfile police = sedan_profile();
    police.type = VehicleType::custom;
    police.model.desired_velocity = config_.police_desired_velocity;
    police.model.max_acceleration = config_.police_max_acceleration;
    Vehicle car = make_vehicle(police, police_id_);
    car.lane_change().reset(); // stays in its lane next to the wreck
    car.radio().transmit_range = config_.police_range;
    car.set_lane(std::min(1, config_.highway.lanes_per_direction - 1));
    car.set_direction(1);
    car.set_x(0.0);
    highway.add_vehicle(std::move(car));
    return true;
  }

  bool control_vehicle(Highway& highway, Vehicle& vehicle, double dt) {
    if (vehicle.id() == obstacle_id_) {
      if (highway.clock() + 1e-9 >= next_broadcast_) {
        std::ostringstream msg;
        msg << "HELP " << config_.obstacle_x;
        channel_.broadcast(highway, vehicle, to_payload(msg.str()));
        next_broadcast_ += config_.broadcast_period;
      }
      return false;
    }
    if (vehicle.id() != police_id_) {
      return false;
    }
    // sharing the wreck's lane (single-lane override): stop behind it
    const double target =
        vehicle.lane() == 0 ? brake_target_ - vehicle.length() - 2.0 : brake_target_;
    if (!braking_) {
      // Hand over to manual braking once stopping at the wreck needs at
      // least the comfortable deceleration.
      const double remaining = target - vehicle.x();
      if (has_target_ && remaining > 0.0 &&
          vehicle.velocity() * vehicle.velocity() / (2.0 * remaining) >= 2.0) {
        braking_ = true;
      } else {
        return false;
      }
    }
    if (stopped_) {
      vehicle.set_acceleration(0.0);
      return true;
    }
    const double remaining = target - vehicle.x();
    double decel = remaining > 0.1 ? vehicle.velocity() * vehicle.velocity() / (2.0 * remaining)
                                   : 8.0;
    // floor keeps the final approach from decaying asymptotically
    decel = std::clamp(decel, 0.5, 8.0);
    const double velocity = std::max(0.0, vehicle.velocity() - decel * dt);
    vehicle.set_acceleration((velocity - vehicle.velocity()) / dt);
    vehicle.set_velocity(velocity);
    vehicle.set_x(vehicle.x() + velocity * dt);
    if (velocity == 0.0) {
      stopped_ = true;
      stop_time_ = highway.clock() + dt;
      stop_x_ = vehicle.x();
      stop_lane_ = vehicle.lane();
    }
    return true;
  }

  void receive_data(Vehicle& receiver, std::span<const std::byte> payload,
                    std::uint32_t sender_address) {
    if (receiver.id() == police_id_) {
      const std::string text = payload_text(payload);
      if (text.rfind("HELP ", 0) == 0) {
        brake_target_ = std::stod(text.substr(5));
        has_target_ = true;
        ++requests_received_;
        channel_.unicast(*highway_, receiver, sender_address, to_payload("POLICE EN ROUTE"));
      }
    } else if (receiver.id() == obstacle_id_) {
      ++replies_received_;
    }
  }

  double stop_time() const { return stop_time_; }
  double stop_x() const { return stop_x_; }
  int stop_lane() const { return stop_lane_; }
  int police_id() const { return police_id_; }
  long requests_received() const { return requests_received_; }

private:
  const ScenarioConfig& config_;
  Channel& channel_;
  Highway* highway_ = nullptr;
  int obstacle_id_ = 0;
  int police_id_ = 0;
  double next_broadcast_ = 0.0;
  bool has_target_ = false;
  bool braking_ = false;
  bool stopped_ = false;
  double brake_target_ = 0.0;
  double stop_time_ = -1.0;
  double stop_x_ = 0.0;
  int stop_lane_ = -1;
  long requests_received_ = 0;
  long replies_received_ = 0;
};

} // namespace

ScenarioConfig load_config(std::string_view text, std::vector<std::string>* applied_defaults) {
  ScenarioConfig config;

  // The scenario selector shifts the defaults, so resolve it first.
  std::istringstream scan{std::string(text)};
  for (std::string line; std::getline(scan, line);) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      continue;
    }
    if (trim(line.substr(0, eq)) == "scenario") {
      config.scenario = trim(line.substr(eq + 1));
    }
  }
  if (config.scenario != "freeflow" && config.scenario != "example5") {
    throw std::invalid_argument("key 'scenario': must be freeflow or example5, got '" +
                                config.scenario + "'");
  }
  if (config.scenario == "example5") {
    apply_example5_preset(config);
  }

  std::set<std::string> seen;
  bool explicit_channel_seed = false;
  std::istringstream in{std::string(text)};
  int line_number = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.resize(hash);
    }
    if (trim(line).empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_number) +
                                  ": expected 'key = value'");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    seen.insert(key);

    if (key == "scenario") {
      // already applied
    } else if (key == "length") {
      config.highway.length = parse_double(key, value);
    } else if (key == "lanes_per_direction") {
      config.highway.lanes_per_direction = parse_int(key, value);
    } else if (key == "lane_width") {
      config.highway.lane_width = parse_double(key, value);
    } else if (key == "median_gap") {
      config.highway.median_gap = parse_double(key, value);
    } else if (key == "bidirectional") {
      config.highway.bidirectional = parse_bool(key, value);
    } else if (key == "delta_t") {
      config.highway.delta_t = parse_double(key, value);
    } else if (key == "lane_change_period_steps") {
      config.highway.lane_change_period_steps = parse_int(key, value);
    } else if (key == "auto_injection") {
      config.highway.auto_injection = parse_bool(key, value);
    } else if (key == "min_gap") {
      config.highway.min_gap = parse_double(key, value);
    } else if (key == "injection_mix") {
      config.highway.injection_mix = parse_double(key, value);
    } else if (key == "seed") {
      config.highway.seed = parse_seed(key, value);
    } else if (key == "lane_change_prefer_right") {
      config.highway.lane_change_prefer_right = parse_bool(key, value);
    } else if (key == "latency_steps") {
      config.channel.latency_steps = parse_int(key, value);
    } else if (key == "loss_probability") {
      config.channel.loss_probability = parse_double(key, value);
    } else if (key == "channel_seed") {
      config.channel.seed = parse_seed(key, value);
      explicit_channel_seed = true;
    } else if (key == "duration") {
      config.duration = parse_double(key, value);
    } else if (key == "sample_period") {
      config.sample_period = parse_double(key, value);
    } else if (key == "detector") {
      std::istringstream dv(value);
      DetectorDef det;
      if (!(dv >> det.x >> det.direction)) {
        throw std::invalid_argument("key 'detector': expected '<x> <direction>', got '" + value +
                                    "'");
      }
      config.detectors.push_back(det);
    } else if (key == "obstacle_x") {
      config.obstacle_x = parse_double(key, value);
    } else if (key == "broadcast_period") {
      config.broadcast_period = parse_double(key, value);
    } else if (key == "police_desired_velocity") {
      config.police_desired_velocity = parse_double(key, value);
    } else if (key == "police_max_acceleration") {
      config.police_max_acceleration = parse_double(key, value);
    } else if (key == "police_range") {
      config.police_range = parse_double(key, value);
    } else {
      throw std::invalid_argument("unknown key '" + key + "'");
    }
  }

  if (!explicit_channel_seed) {
    config.channel.seed = config.highway.seed;
  }
  if (config.detectors.empty() && seen.count("detector") == 0) {
    config.detectors.push_back({0.0, 1});
    config.detectors.push_back({500.0, 1});
    if (config.detectors.back().x > config.highway.length) {
      config.detectors.back().x = config.highway.length / 2.0;
    }
  }

  // Bounds. The highway config knows its own.
  if (std::string msg = config.highway.validate(); !msg.empty()) {
    throw std::invalid_argument(msg);
  }
  if (config.duration <= 0.0) {
    throw std::invalid_argument("key 'duration': must be positive, got " +
                                std::to_string(config.duration));
  }
  if (config.channel.latency_steps < 0) {
    throw std::invalid_argument("key 'latency_steps': must be >= 0");
  }
  if (config.channel.loss_probability < 0.0 || config.channel.loss_probability > 1.0) {
    throw std::invalid_argument("key 'loss_probability': must be in [0, 1]");
  }
  const double ratio = config.sample_period / config.highway.delta_t;
  if (config.sample_period <= 0.0 || std::abs(ratio - std::llround(ratio)) > 1e-6) {
    throw std::invalid_argument(
        "key 'sample_period': must be a positive multiple of delta_t");
  }
  for (const DetectorDef& det : config.detectors) {
    if (det.x < 0.0 || det.x > config.highway.length) {
      throw std::invalid_argument("key 'detector': x must be within [0, length]");
    }
    if (det.direction != 1 && det.direction != -1) {
      throw std::invalid_argument("key 'detector': direction must be +1 or -1");
    }
  }

  if (applied_defaults != nullptr) {
    auto echo = [&](const std::string& key, auto value) {
      if (seen.count(key) == 0) {
        std::ostringstream line;
        line << key << " = " << value;
        applied_defaults->push_back(line.str());
      }
    };
    echo("scenario", config.scenario);
    echo("length", config.highway.length);
    echo("lanes_per_direction", config.highway.lanes_per_direction);
    echo("lane_width", config.highway.lane_width);
    echo("median_gap", config.highway.median_gap);
    echo("bidirectional", config.highway.bidirectional ? "true" : "false");
    echo("delta_t", config.highway.delta_t);
    echo("lane_change_period_steps", config.highway.lane_change_period_steps);
    echo("auto_injection", config.highway.auto_injection ? "true" : "false");
    echo("min_gap", config.highway.min_gap);
    echo("injection_mix", config.highway.injection_mix);
    echo("seed", config.highway.seed);
    echo("lane_change_prefer_right", config.highway.lane_change_prefer_right ? "true" : "false");
    echo("latency_steps", config.channel.latency_steps);
    echo("loss_probability", config.channel.loss_probability);
    echo("channel_seed", config.channel.seed);
    echo("duration", config.duration);
    echo("sample_period", config.sample_period);
    if (seen.count("detector") == 0) {
      for (const DetectorDef& det : config.detectors) {
        std::ostringstream line;
        line << "detector = " << det.x << ' ' << det.direction;
        applied_defaults->push_back(line.str());
      }
    }
    if (config.scenario == "example5") {
      echo("obstacle_x", config.obstacle_x);
      echo("broadcast_period", config.broadcast_period);
      echo("police_desired_velocity", config.police_desired_velocity);
      echo("police_max_acceleration", config.police_max_acceleration);
      echo("police_range", config.police_range);
    }
  }
  return config;
}

ScenarioConfig load_config_file(const std::filesystem::path& path,
                                std::vector<std::string>* applied_defaults) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open config file " + path.string());
  }
  std::ostringstream text;
  text << in.rdbuf();
  return load_config(text.str(), applied_defaults);
}

RunResult run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);

  Channel channel(config.channel);
  Example5Controller controller(config, channel);

  HookSet hooks;
  if (config.scenario == "example5") {
    hooks.init_vehicle = [&](Highway& hw, int& id) { return controller.init_vehicle(hw, id); };
    hooks.control_vehicle = [&](Highway& hw, Vehicle& v, double dt) {
      return controller.control_vehicle(hw, v, dt);
    };
    hooks.receive_data = [&](Vehicle& v, std::span<const std::byte> payload, std::uint32_t sender) {
      controller.receive_data(v, payload, sender);
    };
  }

  Highway highway(config.highway, hooks);
  DetectorBank detectors(config.detectors);

  std::ofstream trace_out(out_dir / "trace.txt");
  if (!trace_out) {
    throw std::runtime_error("cannot write " + (out_dir / "trace.txt").string());
  }
  TraceWriter trace(trace_out);

  const long steps = std::llround(config.duration / config.highway.delta_t);
  const long sample_steps = std::llround(config.sample_period / config.highway.delta_t);

  RunResult result;
  trace.sample(highway);
  double density_sum = 0.0;
  for (long k = 1; k <= steps; ++k) {
    highway.step();
    channel.deliver_pending(highway);
    detectors.observe(highway);
    if (k % sample_steps == 0) {
      trace.sample(highway);
    }
    density_sum += highway.on_road_count() / (config.highway.length / 1000.0);
  }

  result.steps = steps;
  result.vehicles_created = highway.vehicles_created();
  result.vehicles_exited = highway.vehicles_exited();
  result.vehicles_on_road = highway.on_road_count();
  result.mean_density = steps > 0 ? density_sum / static_cast<double>(steps) : 0.0;
  result.messages_sent = channel.messages_sent();
  result.deliveries = channel.deliveries();
  result.drops = channel.drops();
  if (config.scenario == "example5") {
    result.police_stop_time = controller.stop_time();
    result.police_stop_x = controller.stop_x();
    result.police_stop_lane = controller.stop_lane();
  }

  {
    std::ofstream out(out_dir / "detectors.txt");
    detectors.write(out);
  }
  {
    std::ofstream out(out_dir / "channel.log");
    channel.write_log(out);
  }
  {
    std::ofstream out(out_dir / "summary.txt");
    out << "scenario = " << config.scenario << '\n';
    out << "steps = " << result.steps << '\n';
    out << "vehicles_created = " << result.vehicles_created << '\n';
    out << "vehicles_exited = " << result.vehicles_exited << '\n';
    out << "vehicles_on_road = " << result.vehicles_on_road << '\n';
    out << "mean_density_veh_per_km = " << result.mean_density << '\n';
    out << "messages_sent = " << result.messages_sent << '\n';
    out << "deliveries = " << result.deliveries << '\n';
    out << "drops = " << result.drops << '\n';
    if (config.scenario == "example5") {
      out << "police_stop_time = " << result.police_stop_time << '\n';
      out << "police_stop_x = " << result.police_stop_x << '\n';
      out << "police_stop_lane = " << result.police_stop_lane << '\n';
    }
  }
  return result;
}

} // namespace hwsim
