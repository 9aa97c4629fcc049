#include "hwsim/lane_change.hpp"

namespace hwsim {

double idm_acceleration_against(const Vehicle& subject, const Vehicle* front) {
  LocalKinematics kin;
  kin.velocity = subject.velocity();
  if (front != nullptr) {
    kin.gap_to_front = front_gap(subject, *front);
    kin.approach_rate = subject.velocity() - front->velocity();
  }
  return idm_acceleration(*subject.model(), kin);
}

bool check_lane_change(const Vehicle& subject, const Vehicle* current_front,
                       const Vehicle* target_front, const Vehicle* target_back,
                       ChangeDirection direction) {
  if (!subject.model() || !subject.lane_change()) {
    return false;
  }
  const IdmParams& model = *subject.model();
  const MobilParams& mobil = *subject.lane_change();

  // Physical gap requirement in the target lane. A non-positive gap is an
  // overlap and never a change candidate.
  if (target_front != nullptr && front_gap(subject, *target_front) < model.min_gap) {
    return false;
  }
  if (target_back != nullptr && front_gap(*target_back, subject) < model.min_gap) {
    return false;
  }

  const double accel_now = idm_acceleration_against(subject, current_front);
  const double accel_after = idm_acceleration_against(subject, target_front);
  const double gain = accel_after - accel_now;

  double new_follower_loss = 0.0;
  if (target_back != nullptr && target_back->model()) {
    const double follower_before = idm_acceleration_against(*target_back, target_front);
    const double follower_after = idm_acceleration_against(*target_back, &subject);
    if (!mobil_safety_ok(mobil, follower_after)) {
      return false;
    }
    new_follower_loss = follower_before - follower_after;
  }

  // The evaluation only sees the target-lane neighbors, so the old follower
  // contributes no disadvantage term.
  return mobil_incentive_ok(mobil, gain, new_follower_loss, 0.0, direction);
}

} // namespace hwsim
