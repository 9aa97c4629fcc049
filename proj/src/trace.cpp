#include "hwsim/trace.hpp"

#include <cstdio>
#include <ostream>
#include <string>

namespace hwsim {

void TraceWriter::sample(const Highway& highway) {
  if (!first_) {
    out_ << '\n';
  }
  first_ = false;
  char line[256];
  for (const Vehicle* vehicle : highway.on_road_vehicles()) {
    const Vec3 p = highway.global_position(*vehicle);
    std::snprintf(line, sizeof line, "%.3f %d %s %d %d %.6f %.6f %.6f %.6f %.6f\n",
                  highway.clock(), vehicle->id(), std::string(to_string(vehicle->type())).c_str(),
                  vehicle->direction(), vehicle->lane(), p.x, p.y, p.z, vehicle->velocity(),
                  vehicle->acceleration());
    out_ << line;
  }
}

DetectorBank::DetectorBank(std::vector<DetectorDef> detectors)
    : detectors_(std::move(detectors)) {}

void DetectorBank::observe(const Highway& highway) {
  const double delta_t = highway.config().delta_t;
  const double t_end = highway.clock();
  const double t_prev = t_end - delta_t;

  std::map<int, PrevState> current;
  for (const Vehicle* vehicle : highway.on_road_vehicles()) {
    const double front = vehicle->front_x();
    auto it = previous_.find(vehicle->id());
    if (it != previous_.end()) {
      const PrevState& prev = it->second;
      for (std::size_t d = 0; d < detectors_.size(); ++d) {
        const DetectorDef& det = detectors_[d];
        if (det.direction != vehicle->direction()) {
          continue;
        }
        if (prev.front_x <= det.x && det.x < front) {
          const double frac = (det.x - prev.front_x) / (front - prev.front_x);
          records_.push_back({static_cast<int>(d), t_prev + frac * delta_t, vehicle->id(),
                              vehicle->type(),
                              prev.velocity + frac * (vehicle->velocity() - prev.velocity),
                              vehicle->acceleration(), vehicle->lane()});
        }
      }
    }
    current[vehicle->id()] = {front, vehicle->velocity()};
  }
  previous_ = std::move(current);
}

void DetectorBank::write(std::ostream& out) const {
  char line[160];
  for (const DetectorRecord& r : records_) {
    std::snprintf(line, sizeof line, "%d %.6f %d %s %.6f %.6f %d\n", r.detector_id, r.time,
                  r.vehicle_id, std::string(to_string(r.type)).c_str(), r.velocity, r.acceleration,
                  r.lane);
    out << line;
  }
}

} // namespace hwsim
