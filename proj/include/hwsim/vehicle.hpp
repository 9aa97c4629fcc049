#pragma once

#include "hwsim/mobility.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace hwsim {

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};

/// Wireless settings of a node. The address equals the vehicle id.
struct RadioParams {
  std::uint32_t address = 0;
  double transmit_range = 250.0; // m, unit-disk radius
  bool enabled = true;
};

enum class VehicleType { sedan, truck, obstacle, custom };

std::string_view to_string(VehicleType type);

/// Geometry plus driver models for a vehicle class. The sedan and truck
/// profiles carry commonly used IDM/MOBIL defaults; callers can build any
/// custom profile (police cars, buses, careful or pushy drivers).
struct VehicleProfile {
  VehicleType type = VehicleType::custom;
  double length = 4.5; // m
  double width = 1.8;  // m
  IdmParams model;
  MobilParams lane_change;
};

VehicleProfile sedan_profile();
VehicleProfile truck_profile();

/// Politeness presets for the MOBIL incentive criterion.
MobilParams considerate_driver();   // p = 0.5
MobilParams inconsiderate_driver(); // p = 0, others' disadvantage discounted

/// A mobile node with a wireless device. The x coordinate is the rear bumper
/// position in the travel frame of the vehicle's direction: x increases along
/// travel for eastbound (+1) and westbound (-1) alike. Obstacles are vehicles
/// whose kinematics are pinned to zero and that never carry driver models.
class Vehicle {
public:
  Vehicle(int id, const VehicleProfile& profile);

  int id() const { return id_; }
  VehicleType type() const { return type_; }
  bool is_obstacle() const { return is_obstacle_; }

  double width() const { return width_; }
  double length() const { return length_; }

  int lane() const { return lane_; }
  int direction() const { return direction_; }
  bool on_road() const { return lane_ >= 0; }

  const Vec3& position() const { return position_; }
  double x() const { return position_.x; }
  double front_x() const { return position_.x + length_; }
  double velocity() const { return velocity_; }
  double acceleration() const { return acceleration_; }

  const std::optional<IdmParams>& model() const { return model_; }
  std::optional<IdmParams>& model() { return model_; }
  const std::optional<MobilParams>& lane_change() const { return lane_change_; }
  std::optional<MobilParams>& lane_change() { return lane_change_; }

  const RadioParams& radio() const { return radio_; }
  RadioParams& radio() { return radio_; }

  /// Kinematic setters are silent no-ops on obstacles; a negative velocity
  /// is clamped to zero (vehicles do not reverse).
  void set_velocity(double v);
  void set_acceleration(double a);
  void set_position(const Vec3& p);
  void set_x(double x);
  void set_lane(int lane) { lane_ = lane; }
  void set_direction(int direction) { direction_ = direction; }
  void set_lateral(double y) { position_.y = y; }

private:
  friend Vehicle make_obstacle(int, const Vec3&);
  friend Vehicle make_obstacle(int, double, int, int);

  int id_;
  VehicleType type_;
  bool is_obstacle_ = false;
  double width_;
  double length_;
  int lane_ = -1;      // -1: not on a roadway lane
  int direction_ = 1;  // +1 eastbound, -1 westbound
  Vec3 position_;
  double velocity_ = 0.0;
  double acceleration_ = 0.0;
  std::optional<IdmParams> model_;
  std::optional<MobilParams> lane_change_;
  RadioParams radio_;
};

/// Builds a vehicle from a profile with zeroed kinematics, off-road until
/// placed. The radio address is set to the id. Id uniqueness is enforced
/// when the vehicle is added to a highway.
Vehicle make_vehicle(const VehicleProfile& profile, int id);
Vehicle make_sedan(int id);
Vehicle make_truck(int id);

/// Off-road obstacle (roadside unit, gantry, buried sensor, helicopter with
/// positive z, ...). Not placeable on a highway lane.
Vehicle make_obstacle(int id, const Vec3& position);

/// On-road obstacle: a lane blocker such as a broken-down car. Takes part in
/// neighbor queries exactly like a stopped vehicle.
Vehicle make_obstacle(int id, double x, int lane, int direction);

/// Bumper-to-bumper gap from `back` to `front` in the shared travel frame:
/// front.x - (back.x + back.length). Negative values indicate an overlap and
/// are reported unclamped. Throws std::invalid_argument on mixed directions.
double front_gap(const Vehicle& back, const Vehicle& front);

} // namespace hwsim
