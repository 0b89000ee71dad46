#include "curla/observation.hpp"

#include <cmath>
#include <stdexcept>

namespace curla {

int observation_dim(const ObservationConfig& config, const VaeParams* vae) {
  if (config.mode == ObservationMode::Bypass)
    return kBypassFeatureDim + kExternalsDim;
  if (vae == nullptr)
    throw std::invalid_argument("observation_dim: VAE mode needs parameters");
  return vae->config.z_dim + kExternalsDim;
}

std::vector<double> build_observation(const EnvSnapshot& snapshot,
                                      const ObservationConfig& config,
                                      const VaeParams* vae,
                                      const EnvConfig& env_config,
                                      const rewards::RewardParams& reward_params,
                                      Rng* rng) {
  std::vector<double> obs;

  if (config.mode == ObservationMode::Vae) {
    if (vae == nullptr)
      throw std::invalid_argument("build_observation: VAE mode needs parameters");
    const RasterFrame frame = rasterize(snapshot, config.raster);
    std::vector<double> z_mu, z_log_var;
    vae_encode(*vae, frame.values, z_mu, z_log_var);
    if (config.latent == LatentMode::Sampled) {
      if (rng == nullptr)
        throw std::invalid_argument("build_observation: sampled mode needs rng");
      std::vector<double> noise(z_mu.size());
      for (double& eps : noise) eps = rng->normal();
      obs = reparameterize(z_mu, z_log_var, noise);
    } else {
      obs = std::move(z_mu);
    }
  } else {
    const VehicleState& agent = snapshot.agent;
    const TrackProjection& proj = snapshot.agent_projection;
    const double alpha = heading_error(proj, agent.heading);

    // Nearest traffic ahead by arc distance, with its closing speed.
    double gap = config.traffic_gap_range;
    double closing = 0.0;
    const double length = snapshot.track->total_length();
    for (const TrafficPose& traffic : snapshot.traffic) {
      double ahead = std::fmod(traffic.track_s - proj.nearest_s, length);
      if (ahead < 0.0) ahead += length;
      if (ahead < gap) {
        gap = ahead;
        closing = agent.speed - traffic.speed;
      }
    }

    obs = {
        clamp(proj.signed_lateral_offset / reward_params.d_max, -1.0, 1.0),
        std::sin(alpha),
        std::cos(alpha),
        clamp(agent.speed / reward_params.v_max, 0.0, 1.0),
        clamp(gap / config.traffic_gap_range, 0.0, 1.0),
        clamp(closing / reward_params.v_max, -1.0, 1.0),
    };
  }

  obs.push_back(clamp(snapshot.agent.acceleration / env_config.accel_max, -1.0, 1.0));
  obs.push_back(clamp(snapshot.agent.steering / env_config.steer_max, -1.0, 1.0));
  obs.push_back(clamp(snapshot.agent.speed / reward_params.v_max, -1.0, 1.0));
  return obs;
}

}  // namespace curla
