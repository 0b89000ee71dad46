#include "curla/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "curla/svg.hpp"

namespace fs = std::filesystem;

namespace curla {
namespace {

constexpr std::uint64_t kStreamInit = 0x696e6974ull;
constexpr std::uint64_t kStreamSample = 0x73616d70ull;
constexpr std::uint64_t kStreamUpdate = 0x75706474ull;
constexpr std::uint64_t kStreamEvalObs = 0x65766f62ull;
constexpr std::uint64_t kStreamDriver = 0x64726976ull;
constexpr std::uint64_t kStreamVae = 0x76616575ull;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

// Terminal off-center steps report d past d_max; clamp before scoring so the
// reward family stays within its domain.
double score_step(const AgentVariant& variant, int episode,
                  const StepOutcome& outcome,
                  const rewards::RewardParams& params) {
  const double d = clamp(outcome.reward_inputs.d, 0.0, params.d_max);
  return curriculum::reward_for_step(variant, episode,
                                     outcome.reward_inputs.alpha, d,
                                     outcome.reward_inputs.speed,
                                     outcome.reward_inputs.collision_intensity,
                                     params);
}

// Policy action layout: [steer, throttle].
Action to_env_action(const std::vector<double>& action) {
  return Action{action[1], action[0]};
}

struct EpisodeTally {
  double reward_sum = 0.0;
  int collisions = 0;
  int steps = 0;
  StepOutcome last;

  void add(const StepOutcome& outcome, double reward) {
    reward_sum += reward;
    if (outcome.reward_inputs.collision_intensity > 0.0) ++collisions;
    ++steps;
    last = outcome;
  }

  EpisodeRecord record(int episode, const std::string& phase,
                       int traffic_count) const {
    EpisodeRecord rec;
    rec.episode = episode;
    rec.phase = phase;
    rec.distance_pct = last.lap_fraction * 100.0;
    rec.avg_speed_kmh = last.episode_time > 0.0
                            ? mps_to_kmh(last.cumulative_distance / last.episode_time)
                            : 0.0;
    rec.episodic_reward = reward_sum;
    rec.collision_count = collisions;
    rec.termination_reason = termination_reason_name(last.reason);
    rec.traffic_count = traffic_count;
    rec.steps = steps;
    return rec;
  }
};

struct ObservationContext {
  const ExperimentConfig* config = nullptr;
  const VaeParams* vae = nullptr;
  Rng* latent_rng = nullptr;

  std::vector<double> operator()(const EnvSnapshot& snapshot) const {
    return build_observation(snapshot, config->observation, vae, config->env,
                             config->reward_params, latent_rng);
  }
};

EpisodeRecord play_eval_episode(Environment& env, const ExperimentConfig& config,
                                const GaussianPolicy& policy,
                                const ObservationContext& obs_ctx,
                                int record_episode, int gating_episode,
                                int layout_index, int traffic_count) {
  env.reset(layout_index, traffic_count);
  EpisodeTally tally;
  while (!env.terminated()) {
    const std::vector<double> obs = obs_ctx(env.snapshot());
    const StepOutcome outcome =
        env.step(to_env_action(policy_mean_action(policy, obs)));
    tally.add(outcome,
              score_step(config.variant, gating_episode, outcome,
                         config.reward_params));
  }
  return tally.record(record_episode, "eval", traffic_count);
}

void write_summary(const std::string& path, const ExperimentConfig& config,
                   double track_length,
                   const std::vector<EpisodeRecord>& records) {
  nlohmann::json j;
  j["variant"] = variant_name(config.variant.kind);
  j["seed"] = config.seed;
  j["total_episodes"] = config.run.total_episodes;
  j["track_length_m"] = track_length;
  j["observation_mode"] =
      config.observation.mode == ObservationMode::Vae ? "vae" : "bypass";

  double train_dist = 0.0, train_speed = 0.0;
  int train_count = 0;
  for (auto it = records.rbegin(); it != records.rend() && train_count < 100; ++it) {
    if (it->phase != "train") continue;
    train_dist += it->distance_pct;
    train_speed += it->avg_speed_kmh;
    ++train_count;
  }
  if (train_count > 0) {
    j["final100_mean_distance_pct"] = train_dist / train_count;
    j["final100_mean_avg_speed_kmh"] = train_speed / train_count;
  }
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << "\n";
}

}  // namespace

std::string episode_csv_header() {
  return "episode,phase,distance_pct,avg_speed_kmh,episodic_reward,"
         "collision_count,termination_reason,traffic_count,steps";
}

void write_episode_csv(const std::string& path,
                       const std::vector<EpisodeRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << episode_csv_header() << "\n";
  for (const auto& r : records) {
    out << r.episode << ',' << r.phase << ',' << format_double(r.distance_pct)
        << ',' << format_double(r.avg_speed_kmh) << ','
        << format_double(r.episodic_reward) << ',' << r.collision_count << ','
        << r.termination_reason << ',' << r.traffic_count << ',' << r.steps
        << "\n";
  }
  if (!out) throw std::runtime_error("write failed for " + path);
}

std::vector<EpisodeRecord> read_episode_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(in, line) || line != episode_csv_header())
    throw std::runtime_error("malformed CSV header in " + path);

  std::vector<EpisodeRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 9)
      throw std::runtime_error("malformed CSV row in " + path);
    EpisodeRecord r;
    r.episode = std::stoi(fields[0]);
    r.phase = fields[1];
    r.distance_pct = std::stod(fields[2]);
    r.avg_speed_kmh = std::stod(fields[3]);
    r.episodic_reward = std::stod(fields[4]);
    r.collision_count = std::stoi(fields[5]);
    r.termination_reason = fields[6];
    r.traffic_count = std::stoi(fields[7]);
    r.steps = std::stoi(fields[8]);
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<double> smooth(const std::vector<double>& series, double factor) {
  if (series.empty()) throw std::invalid_argument("smooth: empty series");
  if (!(factor >= 0.0 && factor < 1.0))
    throw std::invalid_argument("smooth: factor must lie in [0, 1)");
  std::vector<double> out(series.size());
  out[0] = series[0];
  for (std::size_t t = 1; t < series.size(); ++t)
    out[t] = factor * out[t - 1] + (1.0 - factor) * series[t];
  return out;
}

RunArtifacts run_training(
    const ExperimentConfig& config,
    const std::function<void(const EpisodeRecord&)>& on_record) {
  fs::create_directories(config.out_dir);
  if (!fs::is_directory(config.out_dir))
    throw std::runtime_error("output directory is not writable: " +
                             config.out_dir);

  const Track track = build_track(config.track);
  EnvConfig env_config = config.env;
  env_config.rng_seed = config.seed;
  Environment env(track, env_config);

  VaeParams vae;
  const bool use_vae = config.observation.mode == ObservationMode::Vae;
  if (use_vae) {
    if (config.vae_checkpoint.empty() || !fs::exists(config.vae_checkpoint))
      throw std::runtime_error("missing VAE checkpoint: " + config.vae_checkpoint);
    vae = load_vae_checkpoint(config.vae_checkpoint);
  }

  Rng init_rng(derive_seed(config.seed, kStreamInit));
  Rng sample_rng(derive_seed(config.seed, kStreamSample));
  Rng update_rng(derive_seed(config.seed, kStreamUpdate));
  Rng latent_rng(derive_seed(config.seed, kStreamEvalObs));

  const int obs_dim =
      observation_dim(config.observation, use_vae ? &vae : nullptr);
  GaussianPolicy policy =
      make_policy(obs_dim, 2, config.network.policy_hidden,
                  config.network.log_std_init, init_rng);
  policy.log_std_min = config.network.log_std_min;
  policy.log_std_max = config.network.log_std_max;
  ValueFunction value_fn =
      make_value_function(obs_dim, config.network.value_hidden, init_rng);
  PpoOptimizer optimizer(policy, value_fn);
  RolloutBuffer buffer(config.ppo.horizon);

  ObservationContext obs_ctx{&config, use_vae ? &vae : nullptr, &latent_rng};

  RunArtifacts artifacts;
  const int total = config.run.total_episodes;
  for (int episode = 0; episode < total; ++episode) {
    const int traffic =
        curriculum::traffic_count_for_episode(config.variant, episode);
    env.reset(episode, traffic);

    EpisodeTally tally;
    std::vector<double> obs = obs_ctx(env.snapshot());
    while (!env.terminated()) {
      const PolicySample sample = policy_sample(policy, obs, sample_rng);
      const StepOutcome outcome = env.step(to_env_action(sample.action));
      const double reward =
          score_step(config.variant, episode, outcome, config.reward_params);
      tally.add(outcome, reward);

      Transition transition;
      transition.observation = obs;
      transition.pre_squash_action = sample.pre_squash;
      transition.log_prob = sample.log_prob;
      transition.reward = reward;
      transition.value = value_fn.value(obs);
      transition.done = outcome.terminated;
      buffer.push(std::move(transition));

      std::vector<double> next_obs;
      if (!outcome.terminated) next_obs = obs_ctx(env.snapshot());
      if (buffer.full()) {
        buffer.set_bootstrap_value(
            outcome.terminated ? 0.0 : value_fn.value(next_obs));
        ppo_update(policy, value_fn, buffer, config.ppo, optimizer, update_rng);
        buffer.clear();
      }
      obs = std::move(next_obs);
    }
    artifacts.records.push_back(tally.record(episode, "train", traffic));
    if (on_record) on_record(artifacts.records.back());

    if ((episode + 1) % config.run.eval_every == 0) {
      for (int k = 0; k < config.run.eval_episodes_per_point; ++k) {
        // Layout indices beyond the training range keep eval layouts fresh
        // while staying a pure function of (seed, episode).
        artifacts.records.push_back(play_eval_episode(
            env, config, policy, obs_ctx, episode + 1, episode,
            total + episode + 1 + k * total, traffic));
        if (on_record) on_record(artifacts.records.back());
      }
    }
    if (config.run.checkpoint_every > 0 &&
        (episode + 1) % config.run.checkpoint_every == 0) {
      char name[64];
      std::snprintf(name, sizeof(name), "checkpoint_ep%06d.ckpt", episode + 1);
      save_policy_checkpoint((fs::path(config.out_dir) / name).string(), policy,
                             value_fn);
    }
  }

  artifacts.final_checkpoint_path =
      (fs::path(config.out_dir) / "checkpoint_final.ckpt").string();
  save_policy_checkpoint(artifacts.final_checkpoint_path, policy, value_fn);
  artifacts.csv_path = (fs::path(config.out_dir) / "run.csv").string();
  write_episode_csv(artifacts.csv_path, artifacts.records);
  artifacts.summary_path = (fs::path(config.out_dir) / "summary.json").string();
  write_summary(artifacts.summary_path, config, track.total_length(),
                artifacts.records);
  return artifacts;
}

std::vector<EpisodeRecord> run_eval_episodes(const ExperimentConfig& config,
                                             const GaussianPolicy& policy,
                                             int episodes,
                                             int first_layout_index) {
  const Track track = build_track(config.track);
  EnvConfig env_config = config.env;
  env_config.rng_seed = config.seed;
  Environment env(track, env_config);

  VaeParams vae;
  const bool use_vae = config.observation.mode == ObservationMode::Vae;
  if (use_vae) vae = load_vae_checkpoint(config.vae_checkpoint);
  Rng latent_rng(derive_seed(config.seed, kStreamEvalObs));
  ObservationContext obs_ctx{&config, use_vae ? &vae : nullptr, &latent_rng};

  const int last_episode = config.run.total_episodes - 1;
  const int traffic =
      curriculum::traffic_count_for_episode(config.variant, last_episode);
  std::vector<EpisodeRecord> records;
  for (int i = 0; i < episodes; ++i) {
    records.push_back(play_eval_episode(env, config, policy, obs_ctx, i,
                                        last_episode, first_layout_index + i,
                                        traffic));
  }
  return records;
}

std::vector<EpisodeRecord> run_eval(const ExperimentConfig& config,
                                    const std::string& checkpoint_path,
                                    int episodes) {
  GaussianPolicy policy;
  ValueFunction value_fn;
  load_policy_checkpoint(checkpoint_path, policy, value_fn);
  // In VAE mode a latent-size mismatch surfaces as a forward-pass error.
  if (config.observation.mode == ObservationMode::Bypass &&
      policy.mean_net.input_dim() != observation_dim(config.observation, nullptr))
    throw std::runtime_error("checkpoint/config observation size mismatch");
  return run_eval_episodes(config, policy, episodes);
}

Action scripted_driver_action(const EnvSnapshot& snapshot, double target_offset,
                              double target_speed_kmh) {
  const TrackProjection& proj = snapshot.agent_projection;
  const double alpha = heading_error(proj, snapshot.agent.heading);
  const double offset_error = proj.signed_lateral_offset - target_offset;
  const double desired_alpha = clamp(-0.3 * offset_error, -0.4, 0.4);
  Action action;
  action.steer = clamp(4.0 * (desired_alpha - alpha), -1.0, 1.0);
  action.throttle =
      clamp(0.15 * (target_speed_kmh - snapshot.agent.speed), -1.0, 1.0);
  return action;
}

void save_frame(const std::string& path, const RasterFrame& frame) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path);
  const char magic[4] = {'C', 'R', 'F', 'R'};
  out.write(magic, 4);
  const std::uint32_t version = 1, w = static_cast<std::uint32_t>(frame.width),
                      h = static_cast<std::uint32_t>(frame.height);
  out.write(reinterpret_cast<const char*>(&version), 4);
  out.write(reinterpret_cast<const char*>(&w), 4);
  out.write(reinterpret_cast<const char*>(&h), 4);
  out.write(reinterpret_cast<const char*>(frame.values.data()),
            static_cast<std::streamsize>(frame.values.size() * sizeof(double)));
  if (!out) throw std::runtime_error("write failed for " + path);
}

RasterFrame load_frame(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  char magic[4];
  std::uint32_t version = 0, w = 0, h = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&version), 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in || std::string(magic, 4) != "CRFR" || version != 1)
    throw std::runtime_error("bad frame file " + path);
  RasterFrame frame;
  frame.width = static_cast<int>(w);
  frame.height = static_cast<int>(h);
  frame.values.resize(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(frame.values.data()),
          static_cast<std::streamsize>(frame.values.size() * sizeof(double)));
  if (!in) throw std::runtime_error("truncated frame file " + path);
  return frame;
}

std::vector<std::vector<double>> load_frames_dir(const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("frame_", 0) == 0 && entry.path().extension() == ".bin")
      paths.push_back(entry.path().string());
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty())
    throw std::runtime_error("no frame_*.bin files in " + dir);
  std::vector<std::vector<double>> frames;
  frames.reserve(paths.size());
  for (const auto& p : paths) frames.push_back(load_frame(p).values);
  return frames;
}

int collect_frames(const ExperimentConfig& config, int count,
                   const std::string& out_dir) {
  fs::create_directories(out_dir);
  const Track track = build_track(config.track);
  EnvConfig env_config = config.env;
  env_config.rng_seed = config.seed;
  Environment env(track, env_config);
  Rng rng(derive_seed(config.seed, kStreamDriver));

  constexpr int kFrameStride = 5;
  int written = 0;
  for (int episode = 0; written < count; ++episode) {
    env.reset(episode, config.env.traffic_count);
    const double target_offset = rng.uniform(-1.5, 1.5);
    const double target_speed = rng.uniform(20.0, 45.0);
    int step = 0;
    while (!env.terminated() && written < count) {
      const EnvSnapshot snap = env.snapshot();
      env.step(scripted_driver_action(snap, target_offset, target_speed));
      if (step % kFrameStride == 0) {
        char name[64];
        std::snprintf(name, sizeof(name), "frame_%06d.bin", written);
        save_frame((fs::path(out_dir) / name).string(),
                   rasterize(env.snapshot(), config.observation.raster));
        ++written;
      }
      ++step;
    }
  }
  return written;
}

VaeTrainResult train_vae_on_frames(const ExperimentConfig& config,
                                   const std::string& frames_dir,
                                   const std::string& out_checkpoint,
                                   int epochs) {
  const auto frames = load_frames_dir(frames_dir);
  VaeConfig vae_config = config.vae;
  vae_config.input_dim = static_cast<int>(frames.front().size());
  Rng rng(derive_seed(config.seed, kStreamVae));
  VaeParams params = vae_init(vae_config, rng);
  VaeTrainResult result = vae_train(frames, params, epochs, rng);
  save_vae_checkpoint(out_checkpoint, params);

  std::ofstream csv(out_checkpoint + ".loss.csv", std::ios::trunc);
  csv << "epoch,train_bce,train_kl,val_bce,val_kl\n";
  for (const auto& row : result.history) {
    csv << row.epoch << ',' << format_double(row.train_bce) << ','
        << format_double(row.train_kl) << ',' << format_double(row.val_bce)
        << ',' << format_double(row.val_kl) << "\n";
  }
  return result;
}

namespace {

struct RunSeries {
  std::string label;
  std::vector<EpisodeRecord> records;
};

SvgSeries metric_series(const RunSeries& run, const std::string& phase,
                        bool distance, double smoothing) {
  std::vector<double> xs, ys;
  for (const auto& r : run.records) {
    if (r.phase != phase) continue;
    xs.push_back(static_cast<double>(r.episode));
    ys.push_back(distance ? r.distance_pct : r.avg_speed_kmh);
  }
  SvgSeries series;
  series.label = run.label;
  if (ys.empty()) return series;
  const std::vector<double> smoothed = smooth(ys, smoothing);
  for (std::size_t i = 0; i < xs.size(); ++i)
    series.points.push_back({xs[i], smoothed[i]});
  return series;
}

}  // namespace

void emit_plots(const std::vector<std::string>& run_csv_paths,
                const std::string& out_dir, double smoothing) {
  if (run_csv_paths.empty())
    throw std::invalid_argument("emit_plots: need at least one run CSV");
  fs::create_directories(out_dir);

  std::vector<RunSeries> runs;
  for (const auto& path : run_csv_paths) {
    RunSeries run;
    run.records = read_episode_csv(path);
    run.label = fs::path(path).parent_path().filename().string();
    const fs::path summary = fs::path(path).parent_path() / "summary.json";
    if (fs::exists(summary)) {
      std::ifstream in(summary.string());
      nlohmann::json j;
      in >> j;
      run.label = j.value("variant", run.label) + " seed " +
                  std::to_string(j.value("seed", 0));
    }
    runs.push_back(std::move(run));
  }

  struct ChartSpec {
    const char* file;
    const char* title;
    const char* phase;
    bool distance;
    const char* y_label;
  };
  const ChartSpec specs[] = {
      {"train_distance_traveled.svg", "Training Metric: Distance Traveled",
       "train", true, "Distance (%)"},
      {"train_average_speed.svg", "Training Metric: Average Speed", "train",
       false, "Average Speed (Km/hr)"},
      {"eval_distance_traveled.svg", "Evaluation Metric: Distance Traveled",
       "eval", true, "Distance (%)"},
      {"eval_average_speed.svg", "Evaluation Metric: Average Speed", "eval",
       false, "Average Speed (Km/hr)"},
  };
  for (const auto& spec : specs) {
    SvgChart chart;
    chart.title = spec.title;
    chart.x_label = "Episode";
    chart.y_label = spec.y_label;
    for (const auto& run : runs) {
      SvgSeries series = metric_series(run, spec.phase, spec.distance, smoothing);
      if (!series.points.empty()) chart.series.push_back(std::move(series));
    }
    if (chart.series.empty())
      throw std::runtime_error(std::string("no data for chart ") + spec.file);
    write_svg_chart((fs::path(out_dir) / spec.file).string(), chart);
  }

  // Speed-reward curves sampled from the reward family itself.
  const rewards::RewardParams params;
  SvgChart original, revised;
  original.title = "SCA Reward Function";
  revised.title = "CuRLA & One-Fold CL Reward Function";
  for (SvgChart* chart : {&original, &revised}) {
    chart->x_label = "Speed";
    chart->y_label = "Reward";
  }
  SvgSeries orig_series{"r_v", {}};
  SvgSeries rev_series{"r_v'", {}};
  for (double v = 0.0; v <= params.v_max; v += 0.5) {
    orig_series.points.push_back({v, rewards::speed_reward_original(v, params)});
    rev_series.points.push_back({v, rewards::speed_reward_revised(v, params)});
  }
  original.series.push_back(std::move(orig_series));
  revised.series.push_back(std::move(rev_series));
  write_svg_chart((fs::path(out_dir) / "reward_speed_original.svg").string(),
                  original);
  write_svg_chart((fs::path(out_dir) / "reward_speed_revised.svg").string(),
                  revised);
}

}  // namespace curla
