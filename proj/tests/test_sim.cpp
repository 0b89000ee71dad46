#include <doctest.h>

#include <limits>
#include <stdexcept>

#include <cmath>

#include "curla/rng.hpp"
#include "curla/sim.hpp"

using namespace curla;

namespace {

Track circle_track(double radius = 50.0) {
  TrackSpec spec;
  spec.shape = TrackShape::Circle;
  spec.radius = radius;
  return build_track(spec);
}

// Throttle sequence that parks the agent at an exact speed (km/h).
void drive_to_speed(Environment& env, double target_kmh) {
  const double dv = env.config().accel_max * env.config().dt;  // m/s per step
  double target_mps = kmh_to_mps(target_kmh);
  while (target_mps > 1e-12) {
    const double throttle = std::min(1.0, target_mps / dv);
    env.step({throttle, 0.0});
    target_mps -= std::min(dv, target_mps);
  }
}

}  // namespace

TEST_CASE("reset places agent at origin with empty traffic") {
  const Track track = circle_track();
  EnvConfig config;
  Environment env(track, config);
  env.reset(0, 0);
  CHECK(env.traffic().empty());
  CHECK(env.agent().speed == 0.0);
  CHECK(env.agent().cumulative_distance == 0.0);
  const TrackProjection proj = track.project(env.agent().position);
  CHECK(proj.lateral_offset <= 1e-9);
}

TEST_CASE("reset layouts are deterministic per (seed, episode)") {
  const Track track = circle_track();
  EnvConfig config;
  config.rng_seed = 77;
  Environment a(track, config), b(track, config);
  a.reset(3, 5);
  b.reset(3, 5);
  REQUIRE(a.traffic().size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(a.traffic()[i].track_s == b.traffic()[i].track_s);
    CHECK(a.traffic()[i].speed == b.traffic()[i].speed);
  }
  b.reset(4, 5);
  bool any_different = false;
  for (std::size_t i = 0; i < 5; ++i)
    any_different |= a.traffic()[i].track_s != b.traffic()[i].track_s;
  CHECK(any_different);
}

TEST_CASE("traffic layout keeps 10 m separation from agent and neighbors") {
  const Track track = circle_track();
  EnvConfig config;
  config.rng_seed = 5;
  Environment env(track, config);
  for (int episode = 0; episode < 20; ++episode) {
    env.reset(episode, 8);
    std::vector<double> positions{0.0};  // agent slot
    for (const auto& t : env.traffic()) positions.push_back(t.track_s);
    std::sort(positions.begin(), positions.end());
    for (std::size_t i = 1; i < positions.size(); ++i)
      CHECK(positions[i] - positions[i - 1] >= 10.0 - 1e-9);
    CHECK(track.total_length() - positions.back() >= 10.0 - 1e-9);
  }
}

TEST_CASE("infeasible traffic count is rejected") {
  const Track track = circle_track();  // ~314 m
  EnvConfig config;
  Environment env(track, config);
  CHECK_THROWS_AS(env.reset(0, 500), std::invalid_argument);
}

TEST_CASE("bicycle_step basics") {
  EnvConfig config;
  VehicleState state;
  state.heading = 0.3;

  SUBCASE("at rest with zero action nothing moves") {
    const VehicleState next = bicycle_step(state, {0.0, 0.0}, config.dt, config);
    CHECK(next.position.x == state.position.x);
    CHECK(next.position.y == state.position.y);
    CHECK(next.speed == 0.0);
    CHECK(next.cumulative_distance == 0.0);
  }

  SUBCASE("36 km/h straight for 0.05 s advances 0.5 m") {
    state.speed = 36.0;
    state.heading = 0.0;
    const VehicleState next = bicycle_step(state, {0.0, 0.0}, 0.05, config);
    CHECK(next.position.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(next.position.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(next.cumulative_distance == doctest::Approx(0.5).epsilon(1e-12));
  }

  SUBCASE("braking saturates at zero speed") {
    state.speed = 1.0;
    const VehicleState next = bicycle_step(state, {-1.0, 0.0}, 1.0 / 10.0, config);
    CHECK(next.speed == 0.0);
  }

  SUBCASE("non-finite actions are treated as zero") {
    state.speed = 10.0;
    const VehicleState next = bicycle_step(
        state, {std::nan(""), std::numeric_limits<double>::infinity()},
        config.dt, config);
    CHECK(next.acceleration == 0.0);
    CHECK(next.steering == 0.0);
  }
}

TEST_CASE("constant steer yields curvature tan(delta)/wheelbase") {
  EnvConfig config;
  VehicleState state;
  state.speed = 36.0;
  const double steer_cmd = 0.4;
  double prev_heading = state.heading;
  double heading_sum = 0.0;
  for (int i = 0; i < 2000; ++i) {
    state = bicycle_step(state, {0.0, steer_cmd}, config.dt, config);
    heading_sum += wrap_angle(state.heading - prev_heading);
    prev_heading = state.heading;
  }
  const double curvature = heading_sum / state.cumulative_distance;
  const double expected = std::tan(steer_cmd * config.steer_max) / config.wheelbase;
  CHECK(std::abs(curvature - expected) < 1e-3);
}

TEST_CASE("rear-end collision reports closing speed once") {
  const Track track = circle_track(80.0);
  EnvConfig config;
  config.rng_seed = 9;
  config.traffic_speed_min = 15.0;
  config.traffic_speed_max = 15.0;
  Environment env(track, config);
  env.reset(0, 1);
  drive_to_speed(env, 25.0);
  CHECK(env.agent().speed == doctest::Approx(25.0).epsilon(1e-12));

  // Follow the lane at constant speed until first contact.
  double intensity = 0.0;
  StepOutcome outcome;
  for (int i = 0; i < 20000 && !env.terminated(); ++i) {
    const TrackProjection proj = track.project(env.agent().position);
    const double alpha = heading_error(proj, env.agent().heading);
    const double steer = clamp(
        4.0 * (clamp(-0.3 * proj.signed_lateral_offset, -0.4, 0.4) - alpha),
        -1.0, 1.0);
    outcome = env.step({0.0, steer});
    if (outcome.reward_inputs.collision_intensity > 0.0) {
      intensity = outcome.reward_inputs.collision_intensity;
      break;
    }
  }
  CHECK(intensity == doctest::Approx(10.0).epsilon(1e-9));
  CHECK_FALSE(outcome.terminated);  // collisions never terminate

  // Still overlapping on the next step: single impulse per contact event.
  const StepOutcome next = env.step({0.0, 0.0});
  CHECK(next.reward_inputs.collision_intensity == 0.0);
}

TEST_CASE("no-overlap and separated boxes do not collide") {
  CHECK(oriented_boxes_overlap({0, 0}, 0.0, 2.25, 0.9, {3.0, 0.0}, 0.0, 2.25, 0.9));
  CHECK_FALSE(
      oriented_boxes_overlap({0, 0}, 0.0, 2.25, 0.9, {5.0, 0.0}, 0.0, 2.25, 0.9));
  CHECK_FALSE(
      oriented_boxes_overlap({0, 0}, 0.0, 2.25, 0.9, {0.0, 2.0}, 0.0, 2.25, 0.9));
  // Rotated: diagonal footprint reaches farther.
  CHECK(oriented_boxes_overlap({0, 0}, kPi / 4.0, 2.25, 0.9, {0.0, 2.0}, 0.0,
                               2.25, 0.9));
}

TEST_CASE("termination rules") {
  const Track track = circle_track();
  EnvConfig config;
  Environment env(track, config);

  SUBCASE("stalled after ceil(timeout/dt) steps") {
    env.reset(0, 0);
    int steps = 0;
    while (!env.terminated()) {
      const StepOutcome outcome = env.step({0.0, 0.0});
      ++steps;
      if (outcome.terminated) CHECK(outcome.reason == TerminationReason::Stalled);
    }
    CHECK(steps == 100);  // 5.0 s at 20 Hz
  }

  SUBCASE("slow crawl below threshold also stalls") {
    env.reset(0, 0);
    // Hold ~0.5 km/h: below the 1 km/h threshold but moving.
    drive_to_speed(env, 0.5);
    StepOutcome outcome;
    while (!env.terminated()) outcome = env.step({0.0, 0.0});
    CHECK(outcome.reason == TerminationReason::Stalled);
    CHECK(outcome.episode_time <= 5.3);
  }

  SUBCASE("driving straight off a circle terminates off_center") {
    env.reset(0, 0);
    StepOutcome outcome;
    while (!env.terminated()) outcome = env.step({1.0, 0.0});
    CHECK(outcome.reason == TerminationReason::OffCenter);
    CHECK(outcome.reward_inputs.d > 3.0);
  }

  SUBCASE("three laps terminate laps_done") {
    const Track small = circle_track(10.0);
    Environment lap_env(small, config);
    lap_env.reset(0, 0);
    StepOutcome outcome;
    while (!lap_env.terminated()) {
      const TrackProjection proj = small.project(lap_env.agent().position);
      const double alpha = heading_error(proj, lap_env.agent().heading);
      const double steer = clamp(
          4.0 * (clamp(-0.3 * proj.signed_lateral_offset, -0.4, 0.4) - alpha),
          -1.0, 1.0);
      const double throttle = clamp(0.15 * (20.0 - lap_env.agent().speed), -1.0, 1.0);
      outcome = lap_env.step({throttle, steer});
    }
    CHECK(outcome.reason == TerminationReason::LapsDone);
    CHECK(outcome.lap_fraction >= 3.0);
  }

  SUBCASE("stepping a terminated episode throws") {
    env.reset(0, 0);
    while (!env.terminated()) env.step({0.0, 0.0});
    CHECK_THROWS_AS(env.step({0.0, 0.0}), std::logic_error);
  }
}

TEST_CASE("step sequences are bit-identical across runs") {
  const Track track = circle_track();
  EnvConfig config;
  config.rng_seed = 123;
  Environment a(track, config), b(track, config);
  a.reset(7, 4);
  b.reset(7, 4);
  Rng action_rng(55);
  std::vector<Action> actions;
  for (int i = 0; i < 300; ++i)
    actions.push_back({action_rng.uniform(-1.0, 1.0), action_rng.uniform(-1.0, 1.0)});
  for (const Action& action : actions) {
    if (a.terminated()) break;
    const StepOutcome oa = a.step(action);
    const StepOutcome ob = b.step(action);
    CHECK(oa.reward_inputs.alpha == ob.reward_inputs.alpha);
    CHECK(oa.reward_inputs.d == ob.reward_inputs.d);
    CHECK(oa.reward_inputs.speed == ob.reward_inputs.speed);
    CHECK(oa.cumulative_distance == ob.cumulative_distance);
  }
}

TEST_CASE("per-step invariants hold under random actions") {
  const Track track = circle_track();
  EnvConfig config;
  config.rng_seed = 321;
  Environment env(track, config);
  Rng rng(99);
  double prev_distance = 0.0;
  env.reset(0, 0);
  for (int i = 0; i < 500; ++i) {
    if (env.terminated()) {
      env.reset(i, 0);
      prev_distance = 0.0;
    }
    const StepOutcome o =
        env.step({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)});
    CHECK(o.reward_inputs.alpha > -kPi);
    CHECK(o.reward_inputs.alpha <= kPi);
    CHECK(o.reward_inputs.d >= 0.0);
    CHECK(o.reward_inputs.speed >= 0.0);
    CHECK(o.reward_inputs.collision_intensity == 0.0);  // zero traffic
    CHECK(o.cumulative_distance >= prev_distance);
    prev_distance = o.cumulative_distance;
  }
}
