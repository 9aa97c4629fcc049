#pragma once

#include "hwsim/highway.hpp"

#include <iosfwd>
#include <map>
#include <vector>

namespace hwsim {

/// Writes plot-ready snapshots: one line per on-road entity per sample with
/// columns `time id type direction lane x y z velocity acceleration`, and a
/// blank line between samples so gnuplot can treat each sample as a frame.
/// Westbound x is converted to global coordinates.
class TraceWriter {
public:
  explicit TraceWriter(std::ostream& out) : out_(out) {}

  void sample(const Highway& highway);

private:
  std::ostream& out_;
  bool first_ = true;
};

/// A fixed measurement point at travel-frame position x of one direction.
struct DetectorDef {
  double x = 0.0;
  int direction = 1;
};

struct DetectorRecord {
  int detector_id = 0;
  double time = 0.0; // crossing time, linearly interpolated within the step
  int vehicle_id = 0;
  VehicleType type = VehicleType::custom;
  double velocity = 0.0;
  double acceleration = 0.0;
  int lane = 0;
};

/// Records a crossing whenever a vehicle's front bumper passes a detector
/// between consecutive steps (previous front <= detector < current front).
/// Crossing time and velocity are interpolated linearly within the step.
class DetectorBank {
public:
  explicit DetectorBank(std::vector<DetectorDef> detectors);

  /// Call once after every highway step.
  void observe(const Highway& highway);

  const std::vector<DetectorRecord>& records() const { return records_; }
  void write(std::ostream& out) const;

private:
  struct PrevState {
    double front_x;
    double velocity;
  };

  std::vector<DetectorDef> detectors_;
  std::map<int, PrevState> previous_;
  std::vector<DetectorRecord> records_;
};

} // namespace hwsim
