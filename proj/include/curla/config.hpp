#pragma once
#include <cstdint>
#include <string>

#include "curla/curriculum.hpp"
#include "curla/observation.hpp"
#include "curla/ppo.hpp"
#include "curla/sim.hpp"
#include "curla/track.hpp"

namespace curla {

struct NetworkConfig {
  std::vector<int> policy_hidden = {64, 64};
  std::vector<int> value_hidden = {64, 64};
  double log_std_init = -0.916290731874155;  // ln(0.4)
  double log_std_min = -5.0;
  double log_std_max = 1.0;
};

struct RunConfig {
  int total_episodes = 3500;
  int eval_every = 10;
  int eval_episodes_per_point = 1;
  double smoothing = 0.999;
  int checkpoint_every = 500;
};

struct ExperimentConfig {
  TrackSpec track;
  EnvConfig env;
  rewards::RewardParams reward_params;
  AgentVariant variant;
  PpoHyper ppo;
  NetworkConfig network;
  ObservationConfig observation;
  std::string vae_checkpoint;
  VaeConfig vae;
  RunConfig run;
  std::uint64_t seed = 1;
  std::string out_dir = "runs/out";
};

// Paper-faithful protocol: 3500 episodes, curriculum switch at 1500,
// VAE observations on the ~326 m oval.
ExperimentConfig paper_profile();

// Minutes-scale profile used by the acceptance experiments: 400 episodes,
// switch at 150, bypass observations on a ~174 m oval.
ExperimentConfig desk_profile();

ExperimentConfig profile_by_name(const std::string& name);

// Sectioned key = value text ('#' comments). Values in the file override the
// base profile; unknown sections or keys are rejected.
ExperimentConfig load_config_file(const std::string& path,
                                  const ExperimentConfig& base);

// Derived-field consistency: curriculum total tracks run total, VAE input
// dim tracks the raster size.
void finalize_config(ExperimentConfig& config);

}  // namespace curla
