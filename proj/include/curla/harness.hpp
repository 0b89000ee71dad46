#pragma once
#include <functional>
#include <string>
#include <vector>

#include "curla/checkpoint.hpp"
#include "curla/config.hpp"
#include "curla/observation.hpp"

namespace curla {

struct EpisodeRecord {
  int episode = 0;
  std::string phase;  // "train" or "eval"
  double distance_pct = 0.0;
  double avg_speed_kmh = 0.0;
  double episodic_reward = 0.0;
  int collision_count = 0;
  std::string termination_reason;
  int traffic_count = 0;
  int steps = 0;
};

std::string episode_csv_header();
void write_episode_csv(const std::string& path,
                       const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> read_episode_csv(const std::string& path);

// Exponential moving average: y_0 = x_0, y_t = f*y_{t-1} + (1-f)*x_t.
std::vector<double> smooth(const std::vector<double>& series, double factor);

struct RunArtifacts {
  std::vector<EpisodeRecord> records;
  std::string csv_path;
  std::string summary_path;
  std::string final_checkpoint_path;
};

// Full training protocol: per-episode curriculum resolution, rollouts into a
// horizon buffer spanning episode boundaries, PPO updates whenever it fills,
// an evaluation episode after every eval_every training episodes, periodic
// checkpoints, and the records CSV. on_record, when given, sees every record
// as it is appended.
RunArtifacts run_training(
    const ExperimentConfig& config,
    const std::function<void(const EpisodeRecord&)>& on_record = {});

// Deterministic-action episodes from a checkpoint; no learning.
std::vector<EpisodeRecord> run_eval(const ExperimentConfig& config,
                                    const std::string& checkpoint_path,
                                    int episodes);

// Same, with in-memory networks (used by run_training and tests).
std::vector<EpisodeRecord> run_eval_episodes(const ExperimentConfig& config,
                                             const GaussianPolicy& policy,
                                             int episodes,
                                             int first_layout_index = 0);

// Four metric charts (train/eval x distance/speed), one smoothed line per
// run CSV, plus the two speed-reward curves. Writes 6 SVG files.
void emit_plots(const std::vector<std::string>& run_csv_paths,
                const std::string& out_dir, double smoothing = 0.999);

// Scripted lane-following driver that records raster frames for VAE
// training. Returns the number of frames written.
int collect_frames(const ExperimentConfig& config, int count,
                   const std::string& out_dir);

void save_frame(const std::string& path, const RasterFrame& frame);
RasterFrame load_frame(const std::string& path);
std::vector<std::vector<double>> load_frames_dir(const std::string& dir);

// Trains a VAE on a frame directory, writes the checkpoint and a loss
// history CSV (epoch, train_bce, train_kl, val_bce, val_kl) beside it.
VaeTrainResult train_vae_on_frames(const ExperimentConfig& config,
                                   const std::string& frames_dir,
                                   const std::string& out_checkpoint,
                                   int epochs);

// Proportional lane-following controller used for frame collection.
Action scripted_driver_action(const EnvSnapshot& snapshot, double target_offset,
                              double target_speed_kmh);

}  // namespace curla
