// Command-line driver: train / eval / plot / vae-train / collect-frames,
// plus a batch mode that runs several seeds and variants in parallel.
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>

#include "curla/harness.hpp"
#include "curla/kernels.hpp"

namespace fs = std::filesystem;
using namespace curla;

namespace {

ExperimentConfig resolve_config(const std::string& profile,
                                const std::string& config_path) {
  ExperimentConfig config = profile_by_name(profile);
  if (!config_path.empty()) config = load_config_file(config_path, config);
  return config;
}

int run_one_training(ExperimentConfig config, bool verbose) {
  const RunArtifacts artifacts = run_training(
      config, verbose ? [](const EpisodeRecord& r) {
        if (r.phase == "eval" || r.episode % 25 == 0)
          std::printf("episode %5d [%s] distance %.1f%% avg speed %.1f km/h\n",
                      r.episode, r.phase.c_str(), r.distance_pct,
                      r.avg_speed_kmh);
      } : std::function<void(const EpisodeRecord&)>{});
  std::printf("wrote %s\n", artifacts.csv_path.c_str());
  std::printf("wrote %s\n", artifacts.final_checkpoint_path.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lane-following RL testbed: PPO with a two-fold traffic and "
               "collision-penalty curriculum"};
  app.require_subcommand(1);

  std::string config_path, profile = "paper", variant = "curla", out;
  std::string checkpoint, frames_dir;
  std::uint64_t seed = 1;
  int episodes = 1, count = 500, epochs = 200, jobs = 2;
  double smoothing = 0.999;
  bool quiet = false;
  std::vector<std::string> runs, variants_list, seeds_list;

  auto* train = app.add_subcommand("train", "Train one agent variant");
  train->add_option("--config", config_path, "Config file (overrides profile)");
  train->add_option("--variant", variant, "sca|onefold|curla")->required();
  train->add_option("--seed", seed, "RNG seed");
  train->add_option("--out", out, "Output directory")->required();
  train->add_option("--profile", profile, "paper|desk");
  train->add_flag("--quiet", quiet, "Suppress progress lines");

  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval->add_option("--checkpoint", checkpoint, "Policy checkpoint")->required();
  eval->add_option("--config", config_path, "Config file");
  eval->add_option("--episodes", episodes, "Evaluation episodes");
  eval->add_option("--variant", variant, "sca|onefold|curla");
  eval->add_option("--seed", seed, "RNG seed");
  eval->add_option("--profile", profile, "paper|desk");
  eval->add_option("--out", out, "Optional CSV output path");

  auto* plot = app.add_subcommand("plot", "Render metric charts from runs");
  plot->add_option("--runs", runs, "Run directories (or run.csv paths)")
      ->required()
      ->expected(-1);
  plot->add_option("--out", out, "Output directory")->required();
  plot->add_option("--smoothing", smoothing, "EMA smoothing factor");

  auto* vae_train_cmd = app.add_subcommand("vae-train", "Train the VAE encoder");
  vae_train_cmd->add_option("--frames", frames_dir, "Frame directory")->required();
  vae_train_cmd->add_option("--out", out, "Checkpoint output path")->required();
  vae_train_cmd->add_option("--epochs", epochs, "Training epochs");
  vae_train_cmd->add_option("--config", config_path, "Config file");
  vae_train_cmd->add_option("--profile", profile, "paper|desk");
  vae_train_cmd->add_option("--seed", seed, "RNG seed");

  auto* collect = app.add_subcommand("collect-frames",
                                     "Record raster frames from a scripted driver");
  collect->add_option("--config", config_path, "Config file");
  collect->add_option("--count", count, "Frames to record");
  collect->add_option("--out", out, "Output directory")->required();
  collect->add_option("--profile", profile, "paper|desk");
  collect->add_option("--seed", seed, "RNG seed");

  auto* batch = app.add_subcommand("batch", "Train several variants/seeds");
  batch->add_option("--variants", variants_list, "Variant list")->expected(-1);
  batch->add_option("--seeds", seeds_list, "Seed list")->expected(-1);
  batch->add_option("--config", config_path, "Config file");
  batch->add_option("--profile", profile, "paper|desk");
  batch->add_option("--out", out, "Output directory")->required();
  batch->add_option("--jobs", jobs, "Concurrent runs");

  CLI11_PARSE(app, argc, argv);

  try {
    if (train->parsed()) {
      ExperimentConfig config = resolve_config(profile, config_path);
      config.variant.kind = parse_variant(variant);
      config.seed = seed;
      config.out_dir = out;
      finalize_config(config);
      return run_one_training(config, !quiet);
    }

    if (eval->parsed()) {
      ExperimentConfig config = resolve_config(profile, config_path);
      config.variant.kind = parse_variant(variant);
      config.seed = seed;
      finalize_config(config);
      const auto records = run_eval(config, checkpoint, episodes);
      if (!out.empty()) {
        write_episode_csv(out, records);
        std::printf("wrote %s\n", out.c_str());
      } else {
        std::cout << episode_csv_header() << "\n";
        for (const auto& r : records)
          std::printf("%d,%s,%.12g,%.12g,%.12g,%d,%s,%d,%d\n", r.episode,
                      r.phase.c_str(), r.distance_pct, r.avg_speed_kmh,
                      r.episodic_reward, r.collision_count,
                      r.termination_reason.c_str(), r.traffic_count, r.steps);
      }
      return 0;
    }

    if (plot->parsed()) {
      std::vector<std::string> csvs;
      for (const auto& r : runs) {
        fs::path p(r);
        if (fs::is_directory(p)) p /= "run.csv";
        csvs.push_back(p.string());
      }
      emit_plots(csvs, out, smoothing);
      std::printf("wrote 6 charts to %s\n", out.c_str());
      return 0;
    }

    if (vae_train_cmd->parsed()) {
      ExperimentConfig config = resolve_config(profile, config_path);
      config.seed = seed;
      finalize_config(config);
      const VaeTrainResult result =
          train_vae_on_frames(config, frames_dir, out, epochs);
      std::printf("initial val bce %.2f, final val bce %.2f (%zu epochs)\n",
                  result.initial_val_bce,
                  result.history.empty() ? result.initial_val_bce
                                         : result.history.back().val_bce,
                  result.history.size());
      std::printf("wrote %s\n", out.c_str());
      return 0;
    }

    if (collect->parsed()) {
      ExperimentConfig config = resolve_config(profile, config_path);
      config.seed = seed;
      finalize_config(config);
      const int written = collect_frames(config, count, out);
      std::printf("wrote %d frames to %s\n", written, out.c_str());
      return 0;
    }

    if (batch->parsed()) {
      if (variants_list.empty()) variants_list = {"sca", "onefold", "curla"};
      if (seeds_list.empty()) seeds_list = {"1"};
      struct Job {
        ExperimentConfig config;
      };
      std::vector<Job> queue;
      for (const auto& v : variants_list) {
        for (const auto& s : seeds_list) {
          ExperimentConfig config = resolve_config(profile, config_path);
          config.variant.kind = parse_variant(v);
          config.seed = std::stoull(s);
          config.out_dir = (fs::path(out) / (v + "-seed" + s)).string();
          finalize_config(config);
          queue.push_back({std::move(config)});
        }
      }
      // Independent runs on worker threads; kernel-level parallelism off to
      // avoid oversubscription (results are backend-independent).
      if (jobs > 1) kernels::set_parallel(false);
      std::mutex mutex;
      std::size_t next = 0;
      std::vector<std::string> csvs(queue.size());
      std::vector<std::thread> workers;
      const int worker_count = std::max(1, std::min<int>(jobs, static_cast<int>(queue.size())));
      for (int w = 0; w < worker_count; ++w) {
        workers.emplace_back([&] {
          while (true) {
            std::size_t index;
            {
              std::lock_guard<std::mutex> lock(mutex);
              if (next >= queue.size()) return;
              index = next++;
            }
            const RunArtifacts artifacts = run_training(queue[index].config);
            csvs[index] = artifacts.csv_path;
            std::lock_guard<std::mutex> lock(mutex);
            std::printf("finished %s\n", queue[index].config.out_dir.c_str());
          }
        });
      }
      for (auto& t : workers) t.join();
      kernels::set_parallel(true);
      emit_plots(csvs, (fs::path(out) / "plots").string());
      std::printf("wrote %zu runs and plots under %s\n", queue.size(), out.c_str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
