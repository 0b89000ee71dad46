#pragma once
#include <vector>

#include "curla/raster.hpp"
#include "curla/rewards.hpp"
#include "curla/vae.hpp"

namespace curla {

enum class ObservationMode { Vae, Bypass };
enum class LatentMode { Sampled, Deterministic };

struct ObservationConfig {
  ObservationMode mode = ObservationMode::Bypass;
  LatentMode latent = LatentMode::Deterministic;
  RasterConfig raster;
  double traffic_gap_range = 50.0;  // meters; ahead-gap feature saturation
};

inline constexpr int kExternalsDim = 3;  // acceleration, steering, speed
inline constexpr int kBypassFeatureDim = 6;

int observation_dim(const ObservationConfig& config, const VaeParams* vae);

// VAE mode: rasterize -> encode -> (z or z_mu) ++ externals.
// Bypass mode: handcrafted geometry features ++ externals. rng is only
// consulted in sampled-latent mode.
std::vector<double> build_observation(const EnvSnapshot& snapshot,
                                      const ObservationConfig& config,
                                      const VaeParams* vae,
                                      const EnvConfig& env_config,
                                      const rewards::RewardParams& reward_params,
                                      Rng* rng);

}  // namespace curla
