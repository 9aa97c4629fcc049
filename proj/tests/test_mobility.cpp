#include "hwsim/mobility.hpp"
#include "hwsim/vehicle.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace hwsim;

namespace {

IdmParams sedan_params() {
  return sedan_profile().model;
}

// Independent equilibrium-gap solver: bisect idm_acceleration(v, gap, 0) = 0
// in the gap. Used as the oracle for the closed-form equilibrium identity.
double bisect_equilibrium_gap(const IdmParams& p, double velocity) {
  double lo = p.min_gap * 0.5;
  double hi = 1e7;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double a = idm_acceleration(p, {velocity, mid, 0.0});
    if (a < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

} // namespace

TEST_CASE("desired gap at standstill collapses to the minimum gap") {
  const IdmParams p = sedan_params();
  CHECK(idm_desired_gap(p, 0.0, 0.0) == p.min_gap);
}

TEST_CASE("desired gap at cruise speed is s0 + v*T") {
  const IdmParams p = sedan_params();
  CHECK(idm_desired_gap(p, 30.0, 0.0) == doctest::Approx(47.0).epsilon(1e-12));
}

TEST_CASE("desired gap floors the dynamic term at zero") {
  const IdmParams p = sedan_params();
  // strong opening (front pulling away) makes the dynamic term negative
  const double dv = -10.0;
  const double v = 10.0;
  const double dynamic = v * p.time_headway +
                         v * dv / (2.0 * std::sqrt(p.max_acceleration * p.comfortable_deceleration));
  REQUIRE(dynamic < 0.0);
  CHECK(idm_desired_gap(p, v, dv) == p.min_gap);
}

TEST_CASE("free road at desired velocity gives exactly zero acceleration") {
  const IdmParams p = sedan_params();
  LocalKinematics kin;
  kin.velocity = p.desired_velocity;
  CHECK(idm_acceleration(p, kin) == 0.0);
}

TEST_CASE("standing start on a free road gives exactly max acceleration") {
  const IdmParams p = sedan_params();
  CHECK(idm_acceleration(p, {0.0, std::nullopt, 0.0}) == p.max_acceleration);
}

TEST_CASE("mid-speed car behind a distant leader") {
  // independently evaluated: s* = 2 + 20*1.5 = 32,
  // a = 1.4 * (1 - (20/30)^4 - (32/100)^2) = 0.98009...
  const IdmParams p = sedan_params();
  const double a = idm_acceleration(p, {20.0, 100.0, 0.0});
  CHECK(a == doctest::Approx(1.4 * (1.0 - 16.0 / 81.0 - 0.1024)).epsilon(1e-12));
  CHECK(a == doctest::Approx(0.980).epsilon(1e-3));
}

TEST_CASE("collision-state gap is clamped, not propagated as non-finite") {
  const IdmParams p = sedan_params();
  const double a = idm_acceleration(p, {10.0, -1.0, 0.0});
  CHECK(std::isfinite(a));
  CHECK(a < -100.0); // extreme braking
  CHECK(a == idm_acceleration(p, {10.0, 0.0, 0.0})); // both hit the floor
}

TEST_CASE("acceleration never exceeds max_acceleration, equality only at rest") {
  std::mt19937 rng(42);
  std::uniform_real_distribution<double> vel(0.0, 40.0);
  std::uniform_real_distribution<double> gap(0.1, 500.0);
  std::uniform_real_distribution<double> dv(-20.0, 20.0);
  const IdmParams p = sedan_params();
  for (int i = 0; i < 2000; ++i) {
    const double v = vel(rng);
    const double a = idm_acceleration(p, {v, gap(rng), dv(rng)});
    CHECK(a <= p.max_acceleration);
    if (a == p.max_acceleration) {
      CHECK(v == 0.0);
    }
  }
  CHECK(idm_acceleration(p, {0.0, std::nullopt, 0.0}) == p.max_acceleration);
}

TEST_CASE("acceleration is monotone in velocity and gap") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> vel(0.0, 35.0);
  std::uniform_real_distribution<double> gap(1.0, 400.0);
  std::uniform_real_distribution<double> dv(-15.0, 15.0);
  std::uniform_real_distribution<double> bump(0.01, 5.0);
  const IdmParams p = sedan_params();
  for (int i = 0; i < 2000; ++i) {
    const double v = vel(rng);
    const double g = gap(rng);
    const double d = dv(rng);

    // non-increasing in velocity at fixed gap and approach rate
    const double dv_bump = bump(rng);
    CHECK(idm_acceleration(p, {v + dv_bump, g, d}) <= idm_acceleration(p, {v, g, d}));

    // non-decreasing in gap at fixed velocity and approach rate
    const double dg = bump(rng);
    CHECK(idm_acceleration(p, {v, g + dg, d}) >= idm_acceleration(p, {v, g, d}));
  }
}

TEST_CASE("equilibrium gap matches the closed form against a bisection oracle") {
  const IdmParams p = sedan_params();
  for (double v : {5.0, 10.0, 15.0, 20.0, 25.0}) {
    const double closed_form =
        idm_desired_gap(p, v, 0.0) /
        std::sqrt(1.0 - std::pow(v / p.desired_velocity, p.accel_exponent));
    const double bisected = bisect_equilibrium_gap(p, v);
    CHECK(bisected == doctest::Approx(closed_form).epsilon(1e-9));
    CHECK(idm_acceleration(p, {v, closed_form, 0.0}) == doctest::Approx(0.0).epsilon(1e-9));
  }
}

TEST_CASE("safety criterion is inclusive at the threshold") {
  MobilParams m;
  m.max_safe_deceleration = 4.0;
  CHECK(mobil_safety_ok(m, -2.0));
  CHECK(mobil_safety_ok(m, -4.0));
  CHECK_FALSE(mobil_safety_ok(m, -7.3));
}

TEST_CASE("incentive criterion") {
  MobilParams m;
  m.politeness = 0.5;
  m.changing_threshold = 0.1;
  m.right_bias = 0.0;

  CHECK(mobil_incentive_ok(m, 1.0, 0.0, 0.0, ChangeDirection::toward_left));
  CHECK_FALSE(mobil_incentive_ok(m, 0.0, 0.0, 0.0, ChangeDirection::toward_left));
  // strict comparison: 0.6 > 0.5*(0.8+0.2) + 0.1 is false at equality
  CHECK_FALSE(mobil_incentive_ok(m, 0.6, 0.8, 0.2, ChangeDirection::toward_left));
  CHECK(mobil_incentive_ok(m, 0.6 + 1e-9, 0.8, 0.2, ChangeDirection::toward_left));
}

TEST_CASE("right bias penalizes left changes and favors right changes") {
  MobilParams m;
  m.politeness = 0.0;
  m.changing_threshold = 0.1;
  m.right_bias = 0.2;
  // gain of 0.2 clears the 0.1 threshold only when biased toward the right
  CHECK_FALSE(mobil_incentive_ok(m, 0.2, 0.0, 0.0, ChangeDirection::toward_left));
  CHECK(mobil_incentive_ok(m, 0.2, 0.0, 0.0, ChangeDirection::toward_right));
}
