#pragma once
#include <cmath>
#include <stdexcept>
#include <string>

#include "curla/rewards.hpp"

namespace curla {

enum class VariantKind { Sca, OneFoldCl, CuRla };

enum class RewardFlavor { Original, Revised };

// Per-variant curriculum configuration. SCA trains on the original reward
// with constant traffic; One-Fold CL keeps constant traffic but switches the
// collision penalty on; CuRLA ramps traffic and switches the penalty on.
struct AgentVariant {
  VariantKind kind = VariantKind::CuRla;
  int switch_episode = 1500;
  int total_episodes = 3500;
  int traffic_max = 6;
  int traffic_ramp_episodes = 1000;

  RewardFlavor reward_flavor() const {
    return kind == VariantKind::Sca ? RewardFlavor::Original
                                    : RewardFlavor::Revised;
  }
};

VariantKind parse_variant(const std::string& name);
std::string variant_name(VariantKind kind);

namespace curriculum {

inline void check_episode(const AgentVariant& v, int episode) {
  if (episode < 0 || episode >= v.total_episodes)
    throw std::out_of_range("episode index outside [0, total_episodes)");
}

inline int traffic_count_for_episode(const AgentVariant& v, int episode) {
  check_episode(v, episode);
  if (v.kind != VariantKind::CuRla) return v.traffic_max;
  if (episode < v.switch_episode) return 0;
  const double frac =
      std::min(1.0, static_cast<double>(episode - v.switch_episode + 1) /
                        static_cast<double>(v.traffic_ramp_episodes));
  return static_cast<int>(std::floor(v.traffic_max * frac));
}

inline bool collision_penalty_enabled(const AgentVariant& v, int episode) {
  check_episode(v, episode);
  if (v.kind == VariantKind::Sca) return false;
  return episode >= v.switch_episode;
}

inline double reward_for_step(const AgentVariant& v, int episode, double alpha,
                              double d, double speed, double intensity,
                              const rewards::RewardParams& params = {}) {
  if (v.reward_flavor() == RewardFlavor::Original)
    return rewards::composite_original(alpha, d, speed, params);
  return rewards::composite_revised(alpha, d, speed, intensity,
                                    collision_penalty_enabled(v, episode),
                                    params);
}

}  // namespace curriculum
}  // namespace curla
