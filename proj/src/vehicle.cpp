#include "hwsim/vehicle.hpp"

#include <stdexcept>

namespace hwsim {

std::string_view to_string(VehicleType type) {
  switch (type) {
  case VehicleType::sedan:
    return "sedan";
  case VehicleType::truck:
    return "truck";
  case VehicleType::obstacle:
    return "obstacle";
  case VehicleType::custom:
    return "custom";
  }
  return "custom";
}

VehicleProfile sedan_profile() {
  VehicleProfile p;
  p.type = VehicleType::sedan;
  p.length = 4.5;
  p.width = 1.8;
  p.model = IdmParams{.desired_velocity = 30.0,
                      .time_headway = 1.5,
                      .max_acceleration = 1.4,
                      .comfortable_deceleration = 2.0,
                      .min_gap = 2.0};
  p.lane_change = considerate_driver();
  return p;
}

VehicleProfile truck_profile() {
  VehicleProfile p;
  p.type = VehicleType::truck;
  p.length = 15.0;
  p.width = 2.5;
  p.model = IdmParams{.desired_velocity = 22.0,
                      .time_headway = 1.7,
                      .max_acceleration = 0.7,
                      .comfortable_deceleration = 2.0,
                      .min_gap = 2.0};
  p.lane_change = considerate_driver();
  return p;
}

MobilParams considerate_driver() {
  return MobilParams{.politeness = 0.5};
}

MobilParams inconsiderate_driver() {
  return MobilParams{.politeness = 0.0};
}

Vehicle::Vehicle(int id, const VehicleProfile& profile)
    : id_(id), type_(profile.type), width_(profile.width), length_(profile.length),
      model_(profile.model), lane_change_(profile.lane_change) {
  if (id <= 0) {
    throw std::invalid_argument("vehicle id must be positive");
  }
  if (!profile.model.valid()) {
    throw std::invalid_argument("vehicle profile carries invalid IDM parameters");
  }
  if (!profile.lane_change.valid()) {
    throw std::invalid_argument("vehicle profile carries invalid MOBIL parameters");
  }
  if (width_ <= 0.0 || length_ <= 0.0) {
    throw std::invalid_argument("vehicle geometry must be positive");
  }
  radio_.address = static_cast<std::uint32_t>(id);
}

void Vehicle::set_velocity(double v) {
  if (is_obstacle_) {
    return;
  }
  velocity_ = v < 0.0 ? 0.0 : v;
}

void Vehicle::set_acceleration(double a) {
  if (is_obstacle_) {
    return;
  }
  acceleration_ = a;
}

void Vehicle::set_position(const Vec3& p) {
  if (is_obstacle_) {
    return;
  }
  position_ = p;
}

void Vehicle::set_x(double x) {
  if (is_obstacle_) {
    return;
  }
  position_.x = x;
}

Vehicle make_vehicle(const VehicleProfile& profile, int id) {
  return Vehicle(id, profile);
}

Vehicle make_sedan(int id) {
  return Vehicle(id, sedan_profile());
}

Vehicle make_truck(int id) {
  return Vehicle(id, truck_profile());
}

namespace {

VehicleProfile obstacle_base_profile() {
  VehicleProfile p = sedan_profile();
  p.type = VehicleType::obstacle;
  return p;
}

} // namespace

Vehicle make_obstacle(int id, const Vec3& position) {
  Vehicle v(id, obstacle_base_profile());
  v.position_ = position;
  v.is_obstacle_ = true;
  v.model_.reset();
  v.lane_change_.reset();
  return v;
}

Vehicle make_obstacle(int id, double x, int lane, int direction) {
  if (lane < 0) {
    throw std::invalid_argument("on-road obstacle needs a lane number >= 0");
  }
  if (direction != 1 && direction != -1) {
    throw std::invalid_argument("on-road obstacle needs direction +1 or -1");
  }
  Vehicle v(id, obstacle_base_profile());
  v.position_ = Vec3{x, 0.0, 0.0};
  v.lane_ = lane;
  v.direction_ = direction;
  v.is_obstacle_ = true;
  v.model_.reset();
  v.lane_change_.reset();
  return v;
}

double front_gap(const Vehicle& back, const Vehicle& front) {
  if (back.direction() != front.direction()) {
    throw std::invalid_argument("front_gap requires vehicles in the same direction");
  }
  return front.x() - (back.x() + back.length());
}

} // namespace hwsim
