#pragma once
#include <cstdint>
#include <string>
#include <vector>

#include "curla/track.hpp"

namespace curla {

struct VehicleState {
  Vec2 position;
  double heading = 0.0;              // radians
  double speed = 0.0;                // km/h, >= 0 (no reverse)
  double steering = 0.0;             // radians, |steering| <= steer_max
  double acceleration = 0.0;         // m/s^2, |acceleration| <= accel_max
  double cumulative_distance = 0.0;  // meters
  double half_length = 2.25;         // collision footprint
  double half_width = 0.9;
};

// Traffic follows the centerline exactly at a constant per-episode speed.
struct TrafficVehicle {
  double track_s = 0.0;  // meters along centerline
  double speed = 0.0;    // km/h
  double half_length = 2.25;
  double half_width = 0.9;
};

struct EnvConfig {
  double dt = 0.05;           // seconds, (0, 0.1]
  double steer_max = 0.5;     // radians
  double accel_max = 3.0;     // m/s^2
  double wheelbase = 2.5;     // meters
  double agent_half_length = 2.25;
  double agent_half_width = 0.9;
  double traffic_half_length = 2.25;
  double traffic_half_width = 0.9;
  int traffic_count = 0;
  double traffic_speed_min = 10.0;   // km/h
  double traffic_speed_max = 25.0;   // km/h
  double low_speed_threshold = 1.0;  // km/h
  double low_speed_timeout = 5.0;    // seconds
  double off_center_limit = 3.0;     // meters
  int laps_to_finish = 3;
  std::uint64_t rng_seed = 0;
};

enum class TerminationReason { None, LapsDone, OffCenter, Stalled };

std::string termination_reason_name(TerminationReason reason);

// Per-step reward inputs for the reward family.
struct RewardInputs {
  double alpha = 0.0;                // heading error, radians, (-pi, pi]
  double d = 0.0;                    // lateral offset magnitude, meters
  double speed = 0.0;                // km/h
  double collision_intensity = 0.0;  // closing speed at first contact, km/h
};

struct StepOutcome {
  RewardInputs reward_inputs;
  bool terminated = false;
  TerminationReason reason = TerminationReason::None;
  double lap_fraction = 0.0;
  double cumulative_distance = 0.0;
  double episode_time = 0.0;
};

struct Action {
  double throttle = 0.0;  // [-1, 1]
  double steer = 0.0;     // [-1, 1]
};

// Kinematic bicycle update at a fixed timestep. Non-finite action components
// are treated as zero; finite ones are clamped to [-1, 1].
VehicleState bicycle_step(const VehicleState& state, const Action& action,
                          double dt, const EnvConfig& config);

// Separating-axis overlap test for two oriented rectangles.
bool oriented_boxes_overlap(const Vec2& center_a, double heading_a,
                            double half_len_a, double half_wid_a,
                            const Vec2& center_b, double heading_b,
                            double half_len_b, double half_wid_b);

struct TrafficPose {
  Vec2 position;
  double heading = 0.0;
  double track_s = 0.0;
  double speed = 0.0;  // km/h
  double half_length = 2.25;
  double half_width = 0.9;
};

// Read-only view of the world used to build observations.
struct EnvSnapshot {
  const Track* track = nullptr;
  VehicleState agent;
  TrackProjection agent_projection;
  std::vector<TrafficPose> traffic;
};

// Deterministic fixed-timestep driving environment. Single-owner, internally
// mutable; run independent instances for parallel episodes.
class Environment {
 public:
  Environment(const Track& track, const EnvConfig& config);

  // Places the agent at s=0 on the centerline and draws a traffic layout
  // with >= 10 m arc separation. Identical (rng_seed, episode_index) pairs
  // yield identical layouts. Throws if the traffic count cannot satisfy the
  // separation on this track.
  void reset(int episode_index, int traffic_count_override);
  void reset(int episode_index) { reset(episode_index, config_.traffic_count); }

  // Advances agent and traffic by one dt; throws std::logic_error if the
  // episode has already terminated.
  StepOutcome step(const Action& action);

  bool terminated() const { return terminated_; }
  const VehicleState& agent() const { return agent_; }
  const std::vector<TrafficVehicle>& traffic() const { return traffic_; }
  const Track& track() const { return *track_; }
  const EnvConfig& config() const { return config_; }
  double episode_time() const { return episode_time_; }

  TrafficPose traffic_pose(const TrafficVehicle& vehicle) const;
  EnvSnapshot snapshot() const;

  static constexpr double kMinTrafficSeparation = 10.0;  // meters

 private:
  double detect_collision();
  void check_termination(TerminationReason& reason) const;

  const Track* track_;
  EnvConfig config_;
  VehicleState agent_;
  std::vector<TrafficVehicle> traffic_;
  std::vector<bool> overlapping_;  // per traffic vehicle, previous step
  TrackProjection projection_;
  double episode_time_ = 0.0;
  int low_speed_steps_ = 0;
  int stall_step_limit_ = 0;
  bool terminated_ = true;  // must reset() before stepping
};

}  // namespace curla
