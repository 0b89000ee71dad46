#pragma once
#include <cmath>
#include <stdexcept>

#include "curla/geometry.hpp"

namespace curla::rewards {

struct RewardParams {
  double alpha_max = kPi / 9.0;  // 20 degrees
  double d_max = 3.0;            // meters
  double v_min = 15.0;           // km/h
  double v_target = 60.0;        // km/h
  double v_max = 105.0;          // km/h
};

// Linear falloff from 1 at perfect alignment to 0 at |alpha| >= alpha_max.
inline double angle_reward(double alpha, const RewardParams& p = {}) {
  return std::max(1.0 - std::abs(alpha / p.alpha_max), 0.0);
}

// 1 at the lane center, 0 at d_max. Valid only for live steps, where
// termination bounds d.
inline double centering_reward(double d, const RewardParams& p = {}) {
  if (d < 0.0 || d > p.d_max)
    throw std::invalid_argument("centering_reward: d outside [0, d_max]");
  return 1.0 - d / p.d_max;
}

// Original speed reward: flat plateau of 1 on [v_min, v_target], linear
// ramps outside. Speeds above v_max score 0.
inline double speed_reward_original(double v, const RewardParams& p = {}) {
  if (v < p.v_min) return v / p.v_min;
  if (v <= p.v_target) return 1.0;
  if (v <= p.v_max) return 1.0 - (v - p.v_target) / (p.v_max - p.v_target);
  return 0.0;
}

// Revised speed reward: the plateau is replaced by a ramp so the unique
// maximum sits at v_target. The middle branch runs from (v_min, 0.5) to
// (v_target, 1), meeting the lower branch continuously.
inline double speed_reward_revised(double v, const RewardParams& p = {}) {
  if (v < p.v_min) return 0.5 * v / p.v_min;
  if (v <= p.v_target)
    return 1.0 - 0.5 * (p.v_target - v) / (p.v_target - p.v_min);
  if (v <= p.v_max) return (p.v_max - v) / (p.v_max - p.v_target);
  return 0.0;
}

// Log-scaled penalty in [-1, 0]; contacts with intensity <= 1 are free,
// intensity >= 10 saturates at -1.
inline double collision_penalty(double intensity) {
  if (intensity < 0.0)
    throw std::invalid_argument("collision_penalty: negative intensity");
  return std::max(-1.0, -std::log10(std::max(1.0, intensity)));
}

// r = r_alpha * r_d * r_v, in [0, 1].
inline double composite_original(double alpha, double d, double v,
                                 const RewardParams& p = {}) {
  return angle_reward(alpha, p) * centering_reward(d, p) *
         speed_reward_original(v, p);
}

// r' = r_alpha * r_d * r_v' + r_c, in [-1, 1]. The collision term is gated
// by the curriculum, not here.
inline double composite_revised(double alpha, double d, double v,
                                double intensity, bool collision_term_enabled,
                                const RewardParams& p = {}) {
  const double base = angle_reward(alpha, p) * centering_reward(d, p) *
                      speed_reward_revised(v, p);
  return base + (collision_term_enabled ? collision_penalty(intensity) : 0.0);
}

}  // namespace curla::rewards
