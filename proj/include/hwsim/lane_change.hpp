#pragma once

#include "hwsim/mobility.hpp"
#include "hwsim/vehicle.hpp"

namespace hwsim {

/// IDM acceleration of `subject` against an optional front vehicle, both
/// taken at their current state. Used by the lane-change evaluation for the
/// before/after accelerations of the subject and the prospective follower.
double idm_acceleration_against(const Vehicle& subject, const Vehicle* front);

/// Full MOBIL decision for moving `subject` into the adjacent lane holding
/// `target_front`/`target_back`, evaluated at the subject's unchanged x.
/// True iff (a) both target neighbors leave at least the subject's min_gap,
/// (b) the safety criterion holds for the new follower, and (c) the incentive
/// criterion holds. Absent neighbors are permitted; an overlapping input
/// state yields false. Pure: mutates nothing.
bool check_lane_change(const Vehicle& subject, const Vehicle* current_front,
                       const Vehicle* target_front, const Vehicle* target_back,
                       ChangeDirection direction);

} // namespace hwsim
