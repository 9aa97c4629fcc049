#pragma once

#include <optional>

namespace hwsim {

/// Car-following parameters of the Intelligent Driver Model. Every field is
/// per-vehicle so that sedans, trucks, and special vehicles (police cars,
/// buses, "careful" or "pushy" drivers) can coexist on one highway.
struct IdmParams {
  double desired_velocity;         // v0, m/s
  double time_headway;             // T, s
  double max_acceleration;         // a, m/s^2, free-flow acceleration
  double comfortable_deceleration; // b, m/s^2
  double min_gap;                  // s0, m, standstill distance to the front vehicle
  double accel_exponent = 4.0;     // delta

  bool valid() const {
    return desired_velocity > 0.0 && time_headway > 0.0 && max_acceleration > 0.0 &&
           comfortable_deceleration > 0.0 && min_gap > 0.0 && accel_exponent >= 1.0;
  }
};

/// MOBIL lane-change parameters.
struct MobilParams {
  double politeness = 0.5;            // p, weight on the followers' disadvantage
  double max_safe_deceleration = 4.0; // b_safe, m/s^2
  double changing_threshold = 0.1;    // delta a_th, m/s^2, hysteresis
  double right_bias = 0.2;            // delta a_bias, m/s^2; 0 disables asymmetry

  bool valid() const {
    return politeness >= 0.0 && max_safe_deceleration > 0.0 && changing_threshold >= 0.0 &&
           right_bias >= 0.0;
  }
};

/// Local state a vehicle needs to evaluate its own IDM acceleration.
/// An absent gap means there is no front vehicle in the lane.
struct LocalKinematics {
  double velocity = 0.0;               // own velocity, m/s
  std::optional<double> gap_to_front;  // bumper-to-bumper gap s, m
  double approach_rate = 0.0;          // delta v = v_self - v_front, m/s
};

/// Gap floor used when a caller feeds a collision state (gap <= 0 with a
/// front vehicle present). Keeps the acceleration finite; collisions are
/// detected separately by the highway invariant checks.
inline constexpr double kMinInteractionGap = 0.01; // m

enum class ChangeDirection { toward_left, toward_right };

/// Desired dynamic gap s* = s0 + max(0, v*T + v*dv / (2*sqrt(a*b))).
/// The dynamic term is floored at zero before adding s0, so the result is
/// never below min_gap.
double idm_desired_gap(const IdmParams& params, double velocity, double approach_rate);

/// IDM acceleration a*(1 - (v/v0)^delta - (s*/s)^2). Without a front vehicle
/// the interaction term is exactly zero, so a vehicle at its desired velocity
/// on a free road gets exactly 0.
double idm_acceleration(const IdmParams& params, const LocalKinematics& kin);

/// MOBIL safety criterion: the prospective new follower must not be forced
/// to brake harder than b_safe. Inclusive at the boundary.
bool mobil_safety_ok(const MobilParams& params, double new_follower_accel_after_change);

/// MOBIL incentive criterion, strict at the boundary:
///   gain > p * (new_follower_loss + old_follower_loss) + a_th + bias
/// where bias is +right_bias for a change toward the left and -right_bias
/// toward the right (lane 0 is the rightmost lane of each direction).
bool mobil_incentive_ok(const MobilParams& params, double subject_gain, double new_follower_loss,
                        double old_follower_loss, ChangeDirection direction);

} // namespace hwsim
