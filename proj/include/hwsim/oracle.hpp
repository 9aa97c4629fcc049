#pragma once

// Reference implementations for validating the simulator. Everything here is
// deliberately naive and self-contained: the trajectories come from a
// standalone loop over the car-following formula, never from the highway
// code paths, so agreement between the two is meaningful evidence.

#include "hwsim/mobility.hpp" // parameter structs only; no formula reuse
#include "hwsim/replay.hpp"

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace hwsim::oracle {

/// reference: arithmetic written in the same order as the simulator, for
/// exact-identity checks. perturbed: algebraically equal but with reordered
/// floating-point operations, for tolerance checks.
enum class ArithmeticOrder { reference, perturbed };

struct StateSample {
  double time = 0.0;
  double x = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

struct DetectorCrossing {
  int detector_id = 0;
  double time = 0.0;
  int vehicle_id = 0;
  std::string type;
  double velocity = 0.0;
  double acceleration = 0.0;
  int lane = 0;
};

/// Matched inputs for a comparison: per-vehicle per-step trajectories plus
/// detector crossings. Built either from in-memory runs or from the on-disk
/// trace/detector files.
struct RunData {
  std::map<int, std::vector<StateSample>> trajectories;
  std::vector<DetectorCrossing> detectors;
};

struct PlatoonVehicle {
  int id = 0;
  IdmParams params{};
  double length = 4.5;
  double x = 0.0;
  double velocity = 0.0;
  bool immobile = false; // standing obstacle: never integrated
};

/// Single-lane platoon trajectory: no lane changes, no injection, no
/// removal. Samples the initial state at t = 0 and after every step.
RunData oracle_platoon(std::vector<PlatoonVehicle> vehicles, double delta_t, long steps,
                       ArithmeticOrder order);

/// Builds an injection schedule from entrance-detector records. Times must
/// be non-decreasing.
std::vector<ReplayEntry> replay_injection(const std::vector<DetectorCrossing>& entrance_records);

struct ReplaySetup {
  double road_length = 1000.0;
  int lanes = 2;
  double delta_t = 0.1;
  long steps = 3000;
  double detector_x = 500.0; // one mid-road detector per lane, travel frame
  IdmParams sedan_params{};
  IdmParams truck_params{};
  double sedan_length = 4.5;
  double truck_length = 15.0;
};

/// Replays a schedule over independent lanes: vehicles appear at the
/// entrance at their recorded times and velocities, follow the
/// car-following model in their lane, and leave past road_length. Vehicle
/// ids are assigned in schedule order starting at 1.
RunData oracle_replay_run(const std::vector<ReplayEntry>& schedule, const ReplaySetup& setup,
                          ArithmeticOrder order);

struct TraceRow {
  double time = 0.0;
  int vehicle_id = 0;
  std::string type;
  int direction = 1;
  int lane = 0;
  double x = 0.0, y = 0.0, z = 0.0;
  double velocity = 0.0;
  double acceleration = 0.0;
};

struct DensityPoint {
  double time = 0.0;
  double veh_per_km = 0.0;
};

/// Vehicles-per-km over [x1, x2) for one direction, averaged over a trailing
/// window of `window_seconds`, one point per trace sample.
std::vector<DensityPoint> measure_density(const std::vector<TraceRow>& trace, double x1, double x2,
                                          int direction, double window_seconds);

struct VehicleDelta {
  int vehicle_id = 0;
  int detector_id = 0;
  double dx = 0.0; // position-equivalent offset when passing the detector
  double dv = 0.0;
};

struct DensitySegment {
  double x1 = 0.0;
  double x2 = 500.0;
  double window_seconds = 10.0;
};

struct ComparisonReport {
  // over matched full trajectories, at common sample times
  double max_dx = 0.0;
  double max_dv = 0.0;
  double mean_dx = 0.0;
  double mean_dv = 0.0;
  long compared_samples = 0;
  // per matched (vehicle, detector) crossing pair
  double max_dx_at_detector = 0.0;
  double max_dv_at_detector = 0.0;
  std::vector<VehicleDelta> at_detector;
  std::vector<int> unmatched; // ids present in only one run, excluded from stats
  // density over the observation segment, one curve per run
  std::vector<DensityPoint> density_main;
  std::vector<DensityPoint> density_reference;
};

ComparisonReport compare(const RunData& main_run, const RunData& reference_run,
                         const DensitySegment& segment = {});

std::vector<TraceRow> load_trace(const std::filesystem::path& path);
std::vector<DetectorCrossing> load_detectors(const std::filesystem::path& path);
RunData load_run_dir(const std::filesystem::path& dir); // trace.txt + detectors.txt

void write_report(const ComparisonReport& report, std::ostream& out);
void write_density_csv(const std::vector<DensityPoint>& series, std::ostream& out);

} // namespace hwsim::oracle
