#include "hwsim/highway.hpp"

#include "hwsim/lane_change.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace hwsim {

std::string HighwayConfig::validate() const {
  std::ostringstream out;
  if (!(length > 0.0 && length <= 10000.0)) {
    out << "length must be in (0, 10000] m, got " << length << "; ";
  }
  if (lanes_per_direction < 1 || lanes_per_direction > 5) {
    out << "lanes_per_direction must be in [1, 5], got " << lanes_per_direction << "; ";
  }
  if (lane_width <= 0.0) {
    out << "lane_width must be positive, got " << lane_width << "; ";
  }
  if (median_gap < 0.0) {
    out << "median_gap must be non-negative, got " << median_gap << "; ";
  }
  if (delta_t <= 0.0) {
    out << "delta_t must be positive, got " << delta_t << "; ";
  }
  if (lane_change_period_steps < 1) {
    out << "lane_change_period_steps must be >= 1, got " << lane_change_period_steps << "; ";
  }
  if (min_gap < 0.0) {
    out << "min_gap must be non-negative, got " << min_gap << "; ";
  }
  if (injection_mix < 0.0 || injection_mix > 1.0) {
    out << "injection_mix must be in [0, 1], got " << injection_mix << "; ";
  }
  std::string msg = out.str();
  if (!msg.empty()) {
    msg.resize(msg.size() - 2); // trailing "; "
  }
  return msg;
}

Highway::Highway(const HighwayConfig& config, HookSet hooks)
    : config_(config), hooks_(std::move(hooks)), rng_(config.seed) {
  if (std::string msg = config_.validate(); !msg.empty()) {
    throw std::invalid_argument("invalid highway config: " + msg);
  }
  const int directions = config_.bidirectional ? 2 : 1;
  lanes_.resize(static_cast<std::size_t>(directions) * config_.lanes_per_direction);

  if (hooks_.init_vehicle) {
    const bool modified = hooks_.init_vehicle(*this, next_vehicle_id_);
    if (modified) {
      for (LaneList& lane : lanes_) {
        std::stable_sort(lane.begin(), lane.end(),
                         [](const Vehicle* a, const Vehicle* b) { return a->x() < b->x(); });
      }
    }
  }
}

Highway::LaneList& Highway::lane_list(int lane, int direction) {
  const int dir_index = direction == 1 ? 0 : 1;
  return lanes_[static_cast<std::size_t>(dir_index) * config_.lanes_per_direction + lane];
}

const Highway::LaneList& Highway::lane_list(int lane, int direction) const {
  const int dir_index = direction == 1 ? 0 : 1;
  return lanes_[static_cast<std::size_t>(dir_index) * config_.lanes_per_direction + lane];
}

void Highway::insert_sorted(LaneList& lane, Vehicle* vehicle) {
  // Equal x inserts behind the existing holder of that position.
  auto it = std::lower_bound(lane.begin(), lane.end(), vehicle->x(),
                             [](const Vehicle* v, double x) { return v->x() < x; });
  lane.insert(it, vehicle);
}

Vehicle& Highway::add_vehicle(Vehicle vehicle) {
  if (vehicles_.count(vehicle.id()) != 0) {
    throw std::invalid_argument("duplicate vehicle id " + std::to_string(vehicle.id()));
  }
  if (vehicle.on_road()) {
    if (vehicle.lane() >= config_.lanes_per_direction) {
      throw std::invalid_argument("lane " + std::to_string(vehicle.lane()) +
                                  " out of range [0, " +
                                  std::to_string(config_.lanes_per_direction - 1) + "]");
    }
    if (vehicle.direction() != 1 && vehicle.direction() != -1) {
      throw std::invalid_argument("direction must be +1 or -1");
    }
    if (vehicle.direction() == -1 && !config_.bidirectional) {
      throw std::invalid_argument("westbound vehicle on a unidirectional highway");
    }
  }

  auto owned = std::make_unique<Vehicle>(std::move(vehicle));
  Vehicle* ptr = owned.get();
  vehicles_.emplace(ptr->id(), std::move(owned));

  if (ptr->on_road()) {
    ptr->set_lateral(lane_center_y(ptr->lane(), ptr->direction()));
    insert_sorted(lane_list(ptr->lane(), ptr->direction()), ptr);
    ++vehicles_created_;
  } else {
    auto it = std::lower_bound(off_road_.begin(), off_road_.end(), ptr->id(),
                               [](const Vehicle* v, int id) { return v->id() < id; });
    off_road_.insert(it, ptr);
  }
  return *ptr;
}

void Highway::integrate(Vehicle& vehicle, double accel) {
  double velocity = vehicle.velocity() + accel * config_.delta_t;
  if (velocity < 0.0) {
    // Clamp so the vehicle stops instead of reversing.
    accel = -vehicle.velocity() / config_.delta_t;
    velocity = 0.0;
  }
  vehicle.set_acceleration(accel);
  vehicle.set_velocity(velocity);
  vehicle.set_x(vehicle.x() + velocity * config_.delta_t);
}

void Highway::update_lane_mobility(const LaneList& snapshot) {
  for (std::size_t i = 0; i < snapshot.size(); ++i) {
    Vehicle& vehicle = *snapshot[i];
    // Ascending-x order: the front neighbor has not been integrated yet, so
    // every vehicle reads its leader's pre-step state.
    const Vehicle* front = i + 1 < snapshot.size() ? snapshot[i + 1] : nullptr;
    bool controlled = false;
    if (hooks_.control_vehicle) {
      controlled = hooks_.control_vehicle(*this, vehicle, config_.delta_t);
    }
    if (controlled || vehicle.is_obstacle() || !vehicle.model()) {
      continue;
    }
    LocalKinematics kin;
    kin.velocity = vehicle.velocity();
    if (front != nullptr) {
      kin.gap_to_front = front_gap(vehicle, *front);
      kin.approach_rate = vehicle.velocity() - front->velocity();
    }
    integrate(vehicle, idm_acceleration(*vehicle.model(), kin));
  }
}

void Highway::step() {
  if (failed_) {
    throw std::runtime_error("highway is unusable: an earlier step was aborted by a handler");
  }
  try {
    if (step_count_ % config_.lane_change_period_steps == 0) {
      apply_lane_changes();
    }
    const int directions = config_.bidirectional ? 2 : 1;
    for (int d = 0; d < directions; ++d) {
      const int direction = d == 0 ? 1 : -1;
      for (int lane = 0; lane < config_.lanes_per_direction; ++lane) {
        LaneList snapshot = lane_list(lane, direction);
        update_lane_mobility(snapshot);
      }
    }
    if (hooks_.control_vehicle && !off_road_.empty()) {
      std::vector<Vehicle*> snapshot = off_road_;
      for (Vehicle* vehicle : snapshot) {
        hooks_.control_vehicle(*this, *vehicle, config_.delta_t);
      }
    }
    remove_exited();
    if (config_.auto_injection) {
      try_inject();
    }
  } catch (const std::exception& e) {
    // A throwing handler aborts the step; the partially updated state is
    // never presented as a completed step.
    failed_ = true;
    throw std::runtime_error("step " + std::to_string(step_count_ + 1) +
                             " aborted by handler: " + e.what());
  }
  ++step_count_;
  clock_ = static_cast<double>(step_count_) * config_.delta_t;
}

bool Highway::try_change_to(Vehicle& vehicle, int target_lane) {
  LaneList& current = lane_list(vehicle.lane(), vehicle.direction());
  LaneList& target = lane_list(target_lane, vehicle.direction());

  const Vehicle* current_front = front_neighbor_in(current, vehicle);
  auto it = std::lower_bound(target.begin(), target.end(), vehicle.x(),
                             [](const Vehicle* v, double x) { return v->x() < x; });
  const Vehicle* target_front = it != target.end() ? *it : nullptr;
  const Vehicle* target_back = it != target.begin() ? *(it - 1) : nullptr;
  const ChangeDirection side =
      target_lane > vehicle.lane() ? ChangeDirection::toward_left : ChangeDirection::toward_right;

  if (!check_lane_change(vehicle, current_front, target_front, target_back, side)) {
    return false;
  }

  current.erase(std::find(current.begin(), current.end(), &vehicle));
  const int from_lane = vehicle.lane();
  vehicle.set_lane(target_lane);
  vehicle.set_lateral(lane_center_y(target_lane, vehicle.direction()));
  insert_sorted(target, &vehicle);
  lane_change_events_.push_back(
      {clock_ + config_.delta_t, vehicle.id(), from_lane, target_lane, vehicle.direction()});
  return true;
}

void Highway::apply_lane_changes() {
  // Snapshot every lane before any change so each vehicle is evaluated at
  // most once per cadence; the evaluation itself runs against live lists,
  // so later vehicles see earlier changes and cannot claim the same gap.
  std::vector<LaneList> snapshots = lanes_;
  for (const LaneList& snapshot : snapshots) {
    for (Vehicle* vehicle : snapshot) {
      if (!vehicle->lane_change() || !vehicle->model() || vehicle->is_obstacle()) {
        continue;
      }
      const int lane = vehicle->lane();
      const int right = lane - 1;
      const int left = lane + 1;
      int first = config_.lane_change_prefer_right ? right : left;
      int second = config_.lane_change_prefer_right ? left : right;
      bool changed = false;
      if (first >= 0 && first < config_.lanes_per_direction) {
        changed = try_change_to(*vehicle, first);
      }
      if (!changed && second >= 0 && second < config_.lanes_per_direction) {
        try_change_to(*vehicle, second);
      }
    }
  }
}

void Highway::remove_exited() {
  for (LaneList& lane : lanes_) {
    auto exited = std::stable_partition(lane.begin(), lane.end(), [this](const Vehicle* v) {
      return v->x() <= config_.length;
    });
    for (auto it = exited; it != lane.end(); ++it) {
      exit_events_.push_back({clock_ + config_.delta_t, (*it)->id()});
      ++vehicles_exited_;
      vehicles_.erase((*it)->id());
    }
    lane.erase(exited, lane.end());
  }
}

void Highway::try_inject() {
  std::uniform_real_distribution<double> mix(0.0, 1.0);
  const int directions = config_.bidirectional ? 2 : 1;
  for (int d = 0; d < directions; ++d) {
    const int direction = d == 0 ? 1 : -1;
    for (int lane = 0; lane < config_.lanes_per_direction; ++lane) {
      const LaneList& list = lane_list(lane, direction);
      const Vehicle* rearmost = list.empty() ? nullptr : list.front();
      if (rearmost != nullptr && rearmost->x() < config_.min_gap) {
        continue;
      }
      const bool sedan = mix(rng_) < config_.injection_mix;
      Vehicle vehicle = sedan ? make_sedan(allocate_vehicle_id()) : make_truck(allocate_vehicle_id());
      vehicle.set_lane(lane);
      vehicle.set_direction(direction);
      vehicle.set_x(-vehicle.length()); // front bumper at the entrance
      const double desired = vehicle.model()->desired_velocity;
      vehicle.set_velocity(rearmost ? std::min(desired, rearmost->velocity()) : desired);
      add_vehicle(std::move(vehicle));
    }
  }
}

const Vehicle* Highway::front_neighbor_in(const LaneList& lane, const Vehicle& vehicle) const {
  auto it = std::find(lane.begin(), lane.end(), &vehicle);
  if (it == lane.end() || std::next(it) == lane.end()) {
    return nullptr;
  }
  return *std::next(it);
}

Vehicle* Highway::find_vehicle(int id) {
  auto it = vehicles_.find(id);
  return it == vehicles_.end() ? nullptr : it->second.get();
}

const Vehicle* Highway::find_vehicle(int id) const {
  auto it = vehicles_.find(id);
  return it == vehicles_.end() ? nullptr : it->second.get();
}

std::vector<const Vehicle*> Highway::find_vehicles_in_range(const Vehicle& subject,
                                                            double range) const {
  std::vector<const Vehicle*> found;
  const Vec3 origin = global_position(subject);
  for (const auto& [id, vehicle] : vehicles_) {
    if (id == subject.id()) {
      continue;
    }
    const Vec3 p = global_position(*vehicle);
    const double dx = p.x - origin.x;
    const double dy = p.y - origin.y;
    const double dz = p.z - origin.z;
    if (std::sqrt(dx * dx + dy * dy + dz * dz) <= range) {
      found.push_back(vehicle.get());
    }
  }
  return found;
}

std::vector<const Vehicle*> Highway::find_vehicles_in_segment(int lane, int direction, double x1,
                                                              double x2) const {
  if (x1 > x2) {
    throw std::invalid_argument("segment bounds must satisfy x1 <= x2");
  }
  std::vector<const Vehicle*> found;
  if (lane < 0 || lane >= config_.lanes_per_direction || (direction == -1 && !config_.bidirectional)) {
    return found;
  }
  for (const Vehicle* vehicle : lane_list(lane, direction)) {
    if (vehicle->x() >= x1 && vehicle->x() < x2) {
      found.push_back(vehicle);
    }
  }
  return found;
}

std::vector<const Vehicle*> Highway::lane_vehicles(int lane, int direction) const {
  const LaneList& list = lane_list(lane, direction);
  return {list.begin(), list.end()};
}

std::vector<const Vehicle*> Highway::on_road_vehicles() const {
  std::vector<const Vehicle*> all;
  for (const LaneList& lane : lanes_) {
    all.insert(all.end(), lane.begin(), lane.end());
  }
  return all;
}

std::vector<const Vehicle*> Highway::all_entities() const {
  std::vector<const Vehicle*> all;
  all.reserve(vehicles_.size());
  for (const auto& [id, vehicle] : vehicles_) {
    all.push_back(vehicle.get());
  }
  return all;
}

int Highway::on_road_count() const {
  int count = 0;
  for (const LaneList& lane : lanes_) {
    count += static_cast<int>(lane.size());
  }
  return count;
}

void Highway::dispatch_receive(Vehicle& receiver, std::span<const std::byte> payload,
                               std::uint32_t sender_address) {
  if (hooks_.receive_data) {
    hooks_.receive_data(receiver, payload, sender_address);
  }
}

double Highway::lane_center_y(int lane, int direction) const {
  return direction * (config_.median_gap / 2.0 + (lane + 0.5) * config_.lane_width);
}

Vec3 Highway::global_position(const Vehicle& vehicle) const {
  if (!vehicle.on_road()) {
    return vehicle.position();
  }
  Vec3 p = vehicle.position();
  if (vehicle.direction() == -1) {
    p.x = config_.length - p.x;
  }
  return p;
}

} // namespace hwsim
