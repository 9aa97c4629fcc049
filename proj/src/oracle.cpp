#include "hwsim/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace hwsim::oracle {

namespace {

constexpr double kGapFloor = 0.01; // m, matches the simulator's collision clamp

// Car-following acceleration, written out longhand. The reference variant
// keeps the arithmetic in the same order as the simulator; the perturbed
// variant is algebraically identical but reorders the floating-point
// operations, which shifts results by rounding noise only.
double accel_reference(const IdmParams& p, double v, bool has_front, double gap, double dv) {
  const double free_term = std::pow(v / p.desired_velocity, p.accel_exponent);
  double interaction = 0.0;
  if (has_front) {
    const double dynamic =
        v * p.time_headway +
        v * dv / (2.0 * std::sqrt(p.max_acceleration * p.comfortable_deceleration));
    const double desired = p.min_gap + std::max(0.0, dynamic);
    const double ratio = desired / std::max(gap, kGapFloor);
    interaction = ratio * ratio;
  }
  return p.max_acceleration * (1.0 - free_term - interaction);
}

double accel_perturbed(const IdmParams& p, double v, bool has_front, double gap, double dv) {
  double interaction = 0.0;
  if (has_front) {
    const double dynamic =
        v * dv / (2.0 * (std::sqrt(p.max_acceleration) * std::sqrt(p.comfortable_deceleration))) +
        v * p.time_headway;
    const double desired = std::max(0.0, dynamic) + p.min_gap;
    const double ratio = desired / std::max(gap, kGapFloor);
    interaction = ratio * ratio;
  }
  return p.max_acceleration *
         (1.0 - interaction - std::pow(v / p.desired_velocity, p.accel_exponent));
}

double accel(ArithmeticOrder order, const IdmParams& p, double v, bool has_front, double gap,
             double dv) {
  return order == ArithmeticOrder::reference ? accel_reference(p, v, has_front, gap, dv)
                                             : accel_perturbed(p, v, has_front, gap, dv);
}

struct SimVehicle {
  int id = 0;
  std::string type;
  IdmParams params{};
  double length = 4.5;
  double x = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
  double prev_front = 0.0;
  double prev_velocity = 0.0;
  bool immobile = false;
};

// Semi-implicit Euler with the same no-reversing clamp as the simulator.
void integrate(SimVehicle& v, double acc, double delta_t) {
  double velocity = v.velocity + acc * delta_t;
  if (velocity < 0.0) {
    acc = -v.velocity / delta_t;
    velocity = 0.0;
  }
  v.acceleration = acc;
  v.velocity = velocity;
  v.x = v.x + velocity * delta_t;
}

void advance_lane(std::vector<SimVehicle>& lane, double delta_t, ArithmeticOrder order) {
  // Accelerations from the pre-step state of every vehicle, then integrate.
  std::vector<double> accels(lane.size());
  for (std::size_t i = 0; i < lane.size(); ++i) {
    const SimVehicle& self = lane[i];
    if (i + 1 < lane.size()) {
      const SimVehicle& front = lane[i + 1];
      const double gap = front.x - (self.x + self.length);
      accels[i] = accel(order, self.params, self.velocity, true, gap,
                        self.velocity - front.velocity);
    } else {
      accels[i] = accel(order, self.params, self.velocity, false, 0.0, 0.0);
    }
  }
  for (std::size_t i = 0; i < lane.size(); ++i) {
    if (!lane[i].immobile) {
      integrate(lane[i], accels[i], delta_t);
    }
  }
}

void sample_into(RunData& run, const SimVehicle& v, double time) {
  run.trajectories[v.id].push_back({time, v.x, v.velocity, v.acceleration});
}

} // namespace

RunData oracle_platoon(std::vector<PlatoonVehicle> vehicles, double delta_t, long steps,
                       ArithmeticOrder order) {
  std::vector<SimVehicle> lane;
  lane.reserve(vehicles.size());
  std::sort(vehicles.begin(), vehicles.end(),
            [](const PlatoonVehicle& a, const PlatoonVehicle& b) { return a.x < b.x; });
  for (const PlatoonVehicle& v : vehicles) {
    lane.push_back({v.id, "custom", v.params, v.length, v.x, v.velocity, 0.0, v.x + v.length,
                    v.velocity, v.immobile});
  }

  RunData run;
  for (const SimVehicle& v : lane) {
    sample_into(run, v, 0.0);
  }
  for (long k = 0; k < steps; ++k) {
    advance_lane(lane, delta_t, order);
    const double time = static_cast<double>(k + 1) * delta_t;
    for (const SimVehicle& v : lane) {
      sample_into(run, v, time);
    }
  }
  return run;
}

std::vector<ReplayEntry> replay_injection(const std::vector<DetectorCrossing>& entrance_records) {
  std::vector<ReplayEntry> schedule;
  schedule.reserve(entrance_records.size());
  double last_time = -1.0;
  for (const DetectorCrossing& record : entrance_records) {
    if (record.time < last_time) {
      throw std::invalid_argument("replay_injection: entrance record times must be non-decreasing");
    }
    last_time = record.time;
    schedule.push_back({record.time, record.type, record.velocity, record.lane, 1});
  }
  return schedule;
}

RunData oracle_replay_run(const std::vector<ReplayEntry>& schedule, const ReplaySetup& setup,
                          ArithmeticOrder order) {
  std::vector<std::vector<SimVehicle>> lanes(static_cast<std::size_t>(setup.lanes));
  RunData run;
  std::size_t cursor = 0;
  int next_id = 1;

  for (long k = 0; k < setup.steps; ++k) {
    const double t_prev = static_cast<double>(k) * setup.delta_t;
    const double t_end = static_cast<double>(k + 1) * setup.delta_t;

    for (auto& lane : lanes) {
      advance_lane(lane, setup.delta_t, order);
    }
    // removal past the end of the road, then detector crossings for survivors
    for (auto& lane : lanes) {
      std::erase_if(lane, [&](const SimVehicle& v) { return v.x > setup.road_length; });
      for (std::size_t li = 0; li < lane.size(); ++li) {
        SimVehicle& v = lane[li];
        const double front = v.x + v.length;
        if (v.prev_front <= setup.detector_x && setup.detector_x < front) {
          const double frac = (setup.detector_x - v.prev_front) / (front - v.prev_front);
          run.detectors.push_back({0, t_prev + frac * setup.delta_t, v.id, v.type,
                                   v.prev_velocity + frac * (v.velocity - v.prev_velocity),
                                   v.acceleration, static_cast<int>(&lane - lanes.data())});
        }
        v.prev_front = front;
        v.prev_velocity = v.velocity;
      }
    }
    while (cursor < schedule.size() && schedule[cursor].time <= t_end + 1e-9) {
      const ReplayEntry& entry = schedule[cursor++];
      if (entry.lane < 0 || entry.lane >= setup.lanes) {
        throw std::invalid_argument("replay entry lane out of range");
      }
      SimVehicle v;
      v.id = next_id++;
      v.type = entry.type;
      v.params = entry.type == "truck" ? setup.truck_params : setup.sedan_params;
      v.length = entry.type == "truck" ? setup.truck_length : setup.sedan_length;
      v.x = -v.length;
      v.velocity = entry.velocity;
      v.prev_front = 0.0;
      v.prev_velocity = entry.velocity;
      auto& lane = lanes[static_cast<std::size_t>(entry.lane)];
      auto it = std::lower_bound(lane.begin(), lane.end(), v.x,
                                 [](const SimVehicle& a, double x) { return a.x < x; });
      lane.insert(it, std::move(v));
    }
    for (const auto& lane : lanes) {
      for (const SimVehicle& v : lane) {
        sample_into(run, v, t_end);
      }
    }
  }
  return run;
}

std::vector<DensityPoint> measure_density(const std::vector<TraceRow>& trace, double x1, double x2,
                                          int direction, double window_seconds) {
  std::map<double, long> counts; // sample time -> vehicles inside the segment
  for (const TraceRow& row : trace) {
    counts.try_emplace(row.time, 0);
    if (row.direction == direction && row.x >= x1 && row.x < x2) {
      ++counts[row.time];
    }
  }
  std::vector<DensityPoint> series;
  if (counts.empty()) {
    return series;
  }
  std::vector<std::pair<double, long>> ordered(counts.begin(), counts.end());
  double sample_dt = window_seconds;
  if (ordered.size() > 1) {
    sample_dt = ordered[1].first - ordered[0].first;
  }
  const long window = std::max<long>(1, std::llround(window_seconds / sample_dt));
  const double segment_km = (x2 - x1) / 1000.0;
  long running = 0;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    running += ordered[i].second;
    if (i >= static_cast<std::size_t>(window)) {
      running -= ordered[i - window].second;
    }
    const long in_window = std::min<long>(window, static_cast<long>(i) + 1);
    series.push_back(
        {ordered[i].first, static_cast<double>(running) / in_window / segment_km});
  }
  return series;
}

namespace {

std::vector<DensityPoint> trajectory_density(const RunData& run, const DensitySegment& segment) {
  std::map<double, long> counts;
  for (const auto& [id, samples] : run.trajectories) {
    for (const StateSample& s : samples) {
      counts.try_emplace(s.time, 0);
      if (s.x >= segment.x1 && s.x < segment.x2) {
        ++counts[s.time];
      }
    }
  }
  std::vector<DensityPoint> series;
  if (counts.empty()) {
    return series;
  }
  std::vector<std::pair<double, long>> ordered(counts.begin(), counts.end());
  double sample_dt = segment.window_seconds;
  if (ordered.size() > 1) {
    sample_dt = ordered[1].first - ordered[0].first;
  }
  const long window = std::max<long>(1, std::llround(segment.window_seconds / sample_dt));
  const double segment_km = (segment.x2 - segment.x1) / 1000.0;
  long running = 0;
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    running += ordered[i].second;
    if (i >= static_cast<std::size_t>(window)) {
      running -= ordered[i - window].second;
    }
    const long in_window = std::min<long>(window, static_cast<long>(i) + 1);
    series.push_back(
        {ordered[i].first, static_cast<double>(running) / in_window / segment_km});
  }
  return series;
}

} // namespace

ComparisonReport compare(const RunData& main_run, const RunData& reference_run,
                         const DensitySegment& segment) {
  ComparisonReport report;
  report.density_main = trajectory_density(main_run, segment);
  report.density_reference = trajectory_density(reference_run, segment);

  for (const auto& [id, samples] : main_run.trajectories) {
    auto ref_it = reference_run.trajectories.find(id);
    if (ref_it == reference_run.trajectories.end()) {
      report.unmatched.push_back(id);
      continue;
    }
    const auto& ref = ref_it->second;
    std::size_t i = 0, j = 0;
    while (i < samples.size() && j < ref.size()) {
      const double dt = samples[i].time - ref[j].time;
      if (dt < -1e-9) {
        ++i;
        continue;
      }
      if (dt > 1e-9) {
        ++j;
        continue;
      }
      const double dx = std::abs(samples[i].x - ref[j].x);
      const double dv = std::abs(samples[i].velocity - ref[j].velocity);
      report.max_dx = std::max(report.max_dx, dx);
      report.max_dv = std::max(report.max_dv, dv);
      report.mean_dx += dx;
      report.mean_dv += dv;
      ++report.compared_samples;
      ++i;
      ++j;
    }
  }
  for (const auto& [id, samples] : reference_run.trajectories) {
    if (main_run.trajectories.find(id) == main_run.trajectories.end()) {
      report.unmatched.push_back(id);
    }
  }
  if (report.compared_samples > 0) {
    report.mean_dx /= static_cast<double>(report.compared_samples);
    report.mean_dv /= static_cast<double>(report.compared_samples);
  }

  std::map<std::pair<int, int>, const DetectorCrossing*> ref_crossings;
  for (const DetectorCrossing& c : reference_run.detectors) {
    ref_crossings.try_emplace({c.vehicle_id, c.detector_id}, &c);
  }
  for (const DetectorCrossing& c : main_run.detectors) {
    auto it = ref_crossings.find({c.vehicle_id, c.detector_id});
    if (it == ref_crossings.end()) {
      continue;
    }
    const DetectorCrossing& ref = *it->second;
    const double dt = c.time - ref.time;
    const double dv = std::abs(c.velocity - ref.velocity);
    const double dx = std::abs(dt) * 0.5 * (c.velocity + ref.velocity);
    report.at_detector.push_back({c.vehicle_id, c.detector_id, dx, dv});
    report.max_dx_at_detector = std::max(report.max_dx_at_detector, dx);
    report.max_dv_at_detector = std::max(report.max_dv_at_detector, dv);
  }
  std::sort(report.unmatched.begin(), report.unmatched.end());
  return report;
}

std::vector<TraceRow> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open trace file " + path.string());
  }
  std::vector<TraceRow> rows;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) {
      continue;
    }
    std::istringstream fields(line);
    TraceRow row;
    if (!(fields >> row.time >> row.vehicle_id >> row.type >> row.direction >> row.lane >> row.x >>
          row.y >> row.z >> row.velocity >> row.acceleration)) {
      throw std::runtime_error("malformed trace line: " + line);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<DetectorCrossing> load_detectors(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open detector file " + path.string());
  }
  std::vector<DetectorCrossing> records;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) {
      continue;
    }
    std::istringstream fields(line);
    DetectorCrossing r;
    if (!(fields >> r.detector_id >> r.time >> r.vehicle_id >> r.type >> r.velocity >>
          r.acceleration >> r.lane)) {
      throw std::runtime_error("malformed detector line: " + line);
    }
    records.push_back(std::move(r));
  }
  return records;
}

RunData load_run_dir(const std::filesystem::path& dir) {
  RunData run;
  for (const TraceRow& row : load_trace(dir / "trace.txt")) {
    run.trajectories[row.vehicle_id].push_back({row.time, row.x, row.velocity, row.acceleration});
  }
  run.detectors = load_detectors(dir / "detectors.txt");
  return run;
}

void write_report(const ComparisonReport& report, std::ostream& out) {
  char line[160];
  std::snprintf(line, sizeof line, "compared_samples = %ld\n", report.compared_samples);
  out << line;
  std::snprintf(line, sizeof line, "max_dx = %.12e\n", report.max_dx);
  out << line;
  std::snprintf(line, sizeof line, "max_dv = %.12e\n", report.max_dv);
  out << line;
  std::snprintf(line, sizeof line, "mean_dx = %.12e\n", report.mean_dx);
  out << line;
  std::snprintf(line, sizeof line, "mean_dv = %.12e\n", report.mean_dv);
  out << line;
  std::snprintf(line, sizeof line, "max_dx_at_detector = %.12e\n", report.max_dx_at_detector);
  out << line;
  std::snprintf(line, sizeof line, "max_dv_at_detector = %.12e\n", report.max_dv_at_detector);
  out << line;
  out << "unmatched =";
  for (int id : report.unmatched) {
    out << ' ' << id;
  }
  out << '\n';
  for (const VehicleDelta& d : report.at_detector) {
    std::snprintf(line, sizeof line, "vehicle %d detector %d dx %.12e dv %.12e\n", d.vehicle_id,
                  d.detector_id, d.dx, d.dv);
    out << line;
  }
  for (std::size_t i = 0; i < report.density_main.size(); ++i) {
    std::snprintf(line, sizeof line, "density %.3f %.6f", report.density_main[i].time,
                  report.density_main[i].veh_per_km);
    out << line;
    if (i < report.density_reference.size()) {
      std::snprintf(line, sizeof line, " %.6f", report.density_reference[i].veh_per_km);
      out << line;
    }
    out << '\n';
  }
}

void write_density_csv(const std::vector<DensityPoint>& series, std::ostream& out) {
  out << "time,veh_per_km\n";
  char line[64];
  for (const DensityPoint& p : series) {
    std::snprintf(line, sizeof line, "%.3f,%.6f\n", p.time, p.veh_per_km);
    out << line;
  }
}

} // namespace hwsim::oracle
