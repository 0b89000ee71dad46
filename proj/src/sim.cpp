#include "curla/sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curla/rng.hpp"

namespace curla {
namespace {

constexpr std::uint64_t kLayoutStream = 0x7261666669636bull;  // traffic layouts

double clamp_action(double v) {
  if (!std::isfinite(v)) return 0.0;
  return clamp(v, -1.0, 1.0);
}

}  // namespace

std::string termination_reason_name(TerminationReason reason) {
  switch (reason) {
    case TerminationReason::None: return "none";
    case TerminationReason::LapsDone: return "laps_done";
    case TerminationReason::OffCenter: return "off_center";
    case TerminationReason::Stalled: return "stalled";
  }
  return "none";
}

VehicleState bicycle_step(const VehicleState& state, const Action& action,
                          double dt, const EnvConfig& config) {
  VehicleState next = state;
  next.acceleration = clamp_action(action.throttle) * config.accel_max;
  next.steering = clamp_action(action.steer) * config.steer_max;

  const double v_mps =
      std::max(0.0, kmh_to_mps(state.speed) + next.acceleration * dt);
  next.speed = mps_to_kmh(v_mps);
  next.heading = wrap_angle(state.heading + (v_mps / config.wheelbase) *
                                                std::tan(next.steering) * dt);
  next.position = state.position + heading_vec(next.heading) * (v_mps * dt);
  next.cumulative_distance = state.cumulative_distance + v_mps * dt;
  return next;
}

bool oriented_boxes_overlap(const Vec2& center_a, double heading_a,
                            double half_len_a, double half_wid_a,
                            const Vec2& center_b, double heading_b,
                            double half_len_b, double half_wid_b) {
  const Vec2 dir_a = heading_vec(heading_a);
  const Vec2 nrm_a = left_normal(heading_a);
  const Vec2 dir_b = heading_vec(heading_b);
  const Vec2 nrm_b = left_normal(heading_b);
  const Vec2 delta = center_b - center_a;

  const Vec2 axes[4] = {dir_a, nrm_a, dir_b, nrm_b};
  for (const Vec2& axis : axes) {
    const double dist = std::abs(delta.dot(axis));
    const double extent_a = half_len_a * std::abs(dir_a.dot(axis)) +
                            half_wid_a * std::abs(nrm_a.dot(axis));
    const double extent_b = half_len_b * std::abs(dir_b.dot(axis)) +
                            half_wid_b * std::abs(nrm_b.dot(axis));
    if (dist > extent_a + extent_b) return false;  // separating axis found
  }
  return true;
}

Environment::Environment(const Track& track, const EnvConfig& config)
    : track_(&track), config_(config) {
  if (!(config_.dt > 0.0 && config_.dt <= 0.1))
    throw std::invalid_argument("dt must lie in (0, 0.1]");
  if (config_.traffic_speed_min > config_.traffic_speed_max)
    throw std::invalid_argument("traffic_speed_min exceeds traffic_speed_max");
  // Integer step count avoids FP drift: a never-moving agent terminates in
  // exactly ceil(timeout / dt) steps.
  stall_step_limit_ = static_cast<int>(
      std::ceil(config_.low_speed_timeout / config_.dt - 1e-9));
}

void Environment::reset(int episode_index, int traffic_count_override) {
  if (traffic_count_override < 0)
    throw std::invalid_argument("traffic count must be >= 0");

  agent_ = VehicleState{};
  agent_.position = track_->position_at(0.0);
  agent_.heading = track_->heading_at(0.0);
  agent_.half_length = config_.agent_half_length;
  agent_.half_width = config_.agent_half_width;

  traffic_.clear();
  const int count = traffic_count_override;
  if (count > 0) {
    const double sep = kMinTrafficSeparation;
    const double length = track_->total_length();
    // Agent occupies s=0, so count+1 separated slots must fit on the loop.
    const double free_span = length - (count + 1) * sep;
    if (free_span <= 0.0)
      throw std::invalid_argument(
          "traffic count too large for separation on this track");

    Rng rng(derive_seed(config_.rng_seed, kLayoutStream,
                        static_cast<std::uint64_t>(episode_index)));
    std::vector<double> draws(static_cast<std::size_t>(count));
    for (auto& u : draws) u = rng.uniform(0.0, free_span);
    std::sort(draws.begin(), draws.end());
    for (int i = 0; i < count; ++i) {
      TrafficVehicle vehicle;
      vehicle.track_s = draws[static_cast<std::size_t>(i)] + (i + 1) * sep;
      vehicle.speed = rng.uniform(config_.traffic_speed_min,
                                  config_.traffic_speed_max);
      vehicle.half_length = config_.traffic_half_length;
      vehicle.half_width = config_.traffic_half_width;
      traffic_.push_back(vehicle);
    }
  }
  overlapping_.assign(traffic_.size(), false);

  projection_ = track_->project(agent_.position);
  episode_time_ = 0.0;
  low_speed_steps_ = 0;
  terminated_ = false;
}

TrafficPose Environment::traffic_pose(const TrafficVehicle& vehicle) const {
  TrafficPose pose;
  pose.position = track_->position_at(vehicle.track_s);
  pose.heading = track_->heading_at(vehicle.track_s);
  pose.track_s = vehicle.track_s;
  pose.speed = vehicle.speed;
  pose.half_length = vehicle.half_length;
  pose.half_width = vehicle.half_width;
  return pose;
}

double Environment::detect_collision() {
  double intensity = 0.0;
  for (std::size_t i = 0; i < traffic_.size(); ++i) {
    const TrafficPose pose = traffic_pose(traffic_[i]);
    const bool overlap = oriented_boxes_overlap(
        agent_.position, agent_.heading, agent_.half_length, agent_.half_width,
        pose.position, pose.heading, pose.half_length, pose.half_width);
    if (overlap && !overlapping_[i]) {
      // Single impulse per contact event, scaled by closing speed.
      intensity = std::max(intensity, std::abs(agent_.speed - traffic_[i].speed));
    }
    overlapping_[i] = overlap;
  }
  return intensity;
}

void Environment::check_termination(TerminationReason& reason) const {
  reason = TerminationReason::None;
  if (track_->lap_progress(agent_.cumulative_distance) >=
      static_cast<double>(config_.laps_to_finish)) {
    reason = TerminationReason::LapsDone;
  } else if (projection_.lateral_offset > config_.off_center_limit) {
    reason = TerminationReason::OffCenter;
  } else if (low_speed_steps_ >= stall_step_limit_) {
    reason = TerminationReason::Stalled;
  }
}

StepOutcome Environment::step(const Action& action) {
  if (terminated_)
    throw std::logic_error("step() called on a terminated episode");

  agent_ = bicycle_step(agent_, action, config_.dt, config_);
  const double length = track_->total_length();
  for (auto& vehicle : traffic_) {
    vehicle.track_s =
        std::fmod(vehicle.track_s + kmh_to_mps(vehicle.speed) * config_.dt,
                  length);
  }

  projection_ = track_->project(agent_.position);
  const double intensity = detect_collision();
  episode_time_ += config_.dt;

  if (agent_.speed < config_.low_speed_threshold)
    low_speed_steps_ += 1;
  else
    low_speed_steps_ = 0;

  TerminationReason reason;
  check_termination(reason);
  terminated_ = reason != TerminationReason::None;

  StepOutcome outcome;
  outcome.reward_inputs.alpha = heading_error(projection_, agent_.heading);
  outcome.reward_inputs.d = projection_.lateral_offset;
  outcome.reward_inputs.speed = agent_.speed;
  outcome.reward_inputs.collision_intensity = intensity;
  outcome.terminated = terminated_;
  outcome.reason = reason;
  outcome.lap_fraction = track_->lap_progress(agent_.cumulative_distance);
  outcome.cumulative_distance = agent_.cumulative_distance;
  outcome.episode_time = episode_time_;
  return outcome;
}

EnvSnapshot Environment::snapshot() const {
  EnvSnapshot snap;
  snap.track = track_;
  snap.agent = agent_;
  snap.agent_projection = projection_;
  snap.traffic.reserve(traffic_.size());
  for (const auto& vehicle : traffic_) snap.traffic.push_back(traffic_pose(vehicle));
  return snap;
}

}  // namespace curla
