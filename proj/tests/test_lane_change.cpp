#include "hwsim/lane_change.hpp"

#include <doctest.h>

#include <cmath>

using namespace hwsim;

namespace {

// Independent scalar evaluation of the car-following acceleration, used to
// cross-check the lane-change building blocks without going through the
// library formula.
double naive_idm(const IdmParams& p, double v, double gap, double dv) {
  const double sqrt_ab = std::sqrt(p.max_acceleration * p.comfortable_deceleration);
  double dynamic = v * p.time_headway + v * dv / (2.0 * sqrt_ab);
  if (dynamic < 0.0) {
    dynamic = 0.0;
  }
  const double s_star = p.min_gap + dynamic;
  return p.max_acceleration *
         (1.0 - std::pow(v / p.desired_velocity, p.accel_exponent) - (s_star / gap) * (s_star / gap));
}

Vehicle car_at(int id, double x, double v) {
  Vehicle car = make_sedan(id);
  car.set_x(x);
  car.set_velocity(v);
  car.set_lane(0);
  return car;
}

} // namespace

TEST_CASE("stuck behind a slow truck with an empty target lane") {
  Vehicle subject = car_at(1, 100.0, 25.0);
  Vehicle truck = make_truck(2);
  truck.set_x(110.0);
  truck.set_velocity(15.0);
  CHECK(check_lane_change(subject, &truck, nullptr, nullptr, ChangeDirection::toward_left));
}

TEST_CASE("zero-gap follower in the target lane blocks the change") {
  Vehicle subject = car_at(1, 100.0, 25.0);
  Vehicle follower = car_at(3, 100.0 - 4.5, 25.0); // front bumper touching
  REQUIRE(front_gap(follower, subject) == 0.0);
  CHECK_FALSE(
      check_lane_change(subject, nullptr, nullptr, &follower, ChangeDirection::toward_left));
}

TEST_CASE("four-vehicle configuration, verified by independent evaluation") {
  // subject at 25 m/s behind a truck at 20 m/s, gap 15 m; target lane has a
  // leader 80 m ahead at 25 m/s and a follower 40 m behind at 25 m/s
  Vehicle subject = car_at(1, 0.0, 25.0);
  Vehicle current_front = make_truck(2);
  current_front.set_x(subject.length() + 15.0);
  current_front.set_velocity(20.0);
  Vehicle target_front = car_at(3, subject.length() + 80.0, 25.0);
  Vehicle target_back = car_at(4, -40.0 - 4.5, 25.0); // 40 m gap to the subject

  const IdmParams p = *subject.model();
  const MobilParams m = *subject.lane_change();

  // brute-force both criteria from scratch
  const double a_now = naive_idm(p, 25.0, 15.0, 5.0);
  const double a_after = naive_idm(p, 25.0, 80.0, 0.0);
  const double follower_before = naive_idm(p, 25.0, 40.0 + subject.length() + 80.0, 0.0);
  const double follower_after = naive_idm(p, 25.0, 40.0, 0.0);
  const bool safety = follower_after >= -m.max_safe_deceleration;
  const bool incentive = (a_after - a_now) > m.politeness * (follower_before - follower_after) +
                                                 m.changing_threshold + m.right_bias;
  REQUIRE(safety);
  REQUIRE(incentive);

  CHECK(check_lane_change(subject, &current_front, &target_front, &target_back,
                          ChangeDirection::toward_left));
}

TEST_CASE("safety dominance: an unsafe follower vetoes any incentive") {
  // target follower closing fast from behind: huge incentive for the subject,
  // but the follower would have to brake far beyond b_safe
  Vehicle subject = car_at(1, 100.0, 10.0);
  Vehicle slow_leader = car_at(2, 108.5, 2.0); // current lane is crawling, gap 4 m
  Vehicle fast_follower = car_at(4, subject.x() - 10.0 - 4.5, 35.0);

  const double follower_after =
      idm_acceleration_against(fast_follower, &subject);
  REQUIRE(follower_after < -subject.lane_change()->max_safe_deceleration);
  CHECK_FALSE(check_lane_change(subject, &slow_leader, nullptr, &fast_follower,
                                ChangeDirection::toward_left));
}

TEST_CASE("overlapping input state never proposes a change") {
  Vehicle subject = car_at(1, 100.0, 20.0);
  Vehicle overlapping = car_at(3, 101.0, 20.0); // inside the subject's body
  CHECK_FALSE(
      check_lane_change(subject, nullptr, &overlapping, nullptr, ChangeDirection::toward_left));
}

TEST_CASE("evaluation is pure") {
  Vehicle subject = car_at(1, 100.0, 25.0);
  Vehicle front = make_truck(2);
  front.set_x(112.0);
  front.set_velocity(18.0);
  Vehicle target_back = car_at(4, 60.0, 24.0);

  const double x0 = subject.x();
  const double v0 = subject.velocity();
  const double bx = target_back.x();
  const bool first = check_lane_change(subject, &front, nullptr, &target_back,
                                       ChangeDirection::toward_left);
  const bool second = check_lane_change(subject, &front, nullptr, &target_back,
                                        ChangeDirection::toward_left);
  CHECK(first == second);
  CHECK(subject.x() == x0);
  CHECK(subject.velocity() == v0);
  CHECK(target_back.x() == bx);
}

TEST_CASE("vehicles without models or lane-change params never change") {
  Vehicle obstacle = make_obstacle(1, 100.0, 0, 1);
  CHECK_FALSE(check_lane_change(obstacle, nullptr, nullptr, nullptr,
                                ChangeDirection::toward_left));
}
