#include "hwsim/mobility.hpp"

#include <algorithm>
#include <cmath>

namespace hwsim {

double idm_desired_gap(const IdmParams& params, double velocity, double approach_rate) {
  const double dynamic =
      velocity * params.time_headway +
      velocity * approach_rate /
          (2.0 * std::sqrt(params.max_acceleration * params.comfortable_deceleration));
  return params.min_gap + std::max(0.0, dynamic);
}

double idm_acceleration(const IdmParams& params, const LocalKinematics& kin) {
  const double free_term = std::pow(kin.velocity / params.desired_velocity, params.accel_exponent);
  double interaction = 0.0;
  if (kin.gap_to_front) {
    const double gap = std::max(*kin.gap_to_front, kMinInteractionGap);
    const double desired = idm_desired_gap(params, kin.velocity, kin.approach_rate);
    const double ratio = desired / gap;
    interaction = ratio * ratio;
  }
  return params.max_acceleration * (1.0 - free_term - interaction);
}

bool mobil_safety_ok(const MobilParams& params, double new_follower_accel_after_change) {
  return new_follower_accel_after_change >= -params.max_safe_deceleration;
}

bool mobil_incentive_ok(const MobilParams& params, double subject_gain, double new_follower_loss,
                        double old_follower_loss, ChangeDirection direction) {
  const double bias =
      direction == ChangeDirection::toward_left ? params.right_bias : -params.right_bias;
  const double threshold =
      params.politeness * (new_follower_loss + old_follower_loss) + params.changing_threshold + bias;
  return subject_gain > threshold;
}

} // namespace hwsim
