#include "curla/config.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace curla {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::string strip_quotes(const std::string& s) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"')
    return s.substr(1, s.size() - 2);
  return s;
}

double to_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != value.size())
    throw std::invalid_argument("config: bad numeric value for " + key);
  return out;
}

int to_int(const std::string& key, const std::string& value) {
  const double d = to_double(key, value);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw std::invalid_argument("config: expected integer for " + key);
  return i;
}

bool to_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw std::invalid_argument("config: expected boolean for " + key);
}

std::vector<int> to_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_int(key, item));
  }
  if (out.empty())
    throw std::invalid_argument("config: expected integer list for " + key);
  return out;
}

TrackShape to_shape(const std::string& value) {
  if (value == "circle") return TrackShape::Circle;
  if (value == "oval") return TrackShape::Oval;
  if (value == "rounded_rectangle") return TrackShape::RoundedRectangle;
  throw std::invalid_argument("config: unknown track shape '" + value + "'");
}

void apply_entry(ExperimentConfig& c, const std::string& section,
                 const std::string& key, const std::string& raw) {
  const std::string value = strip_quotes(raw);
  const std::string full = section + "." + key;

  if (section == "track") {
    if (key == "shape") c.track.shape = to_shape(value);
    else if (key == "radius") c.track.radius = to_double(full, value);
    else if (key == "straight_length") c.track.straight_length = to_double(full, value);
    else if (key == "end_radius") c.track.end_radius = to_double(full, value);
    else if (key == "rect_width") c.track.rect_width = to_double(full, value);
    else if (key == "rect_height") c.track.rect_height = to_double(full, value);
    else if (key == "corner_radius") c.track.corner_radius = to_double(full, value);
    else if (key == "spacing") c.track.spacing = to_double(full, value);
    else if (key == "lane_half_width") c.track.lane_half_width = to_double(full, value);
    else throw std::invalid_argument("config: unknown key " + full);
  } else if (section == "env") {
    if (key == "dt") c.env.dt = to_double(full, value);
    else if (key == "steer_max") c.env.steer_max = to_double(full, value);
    else if (key == "accel_max") c.env.accel_max = to_double(full, value);
    else if (key == "wheelbase") c.env.wheelbase = to_double(full, value);
    else if (key == "agent_half_length") c.env.agent_half_length = to_double(full, value);
    else if (key == "agent_half_width") c.env.agent_half_width = to_double(full, value);
    else if (key == "traffic_half_length") c.env.traffic_half_length = to_double(full, value);
    else if (key == "traffic_half_width") c.env.traffic_half_width = to_double(full, value);
    else if (key == "traffic_count") c.env.traffic_count = to_int(full, value);
    else if (key == "traffic_speed_min") c.env.traffic_speed_min = to_double(full, value);
    else if (key == "traffic_speed_max") c.env.traffic_speed_max = to_double(full, value);
    else if (key == "low_speed_threshold") c.env.low_speed_threshold = to_double(full, value);
    else if (key == "low_speed_timeout") c.env.low_speed_timeout = to_double(full, value);
    else if (key == "off_center_limit") c.env.off_center_limit = to_double(full, value);
    else if (key == "laps_to_finish") c.env.laps_to_finish = to_int(full, value);
    else throw std::invalid_argument("config: unknown key " + full);
  } else if (section == "rewards") {
    if (key == "alpha_max") c.reward_params.alpha_max = to_double(full, value);
    else if (key == "d_max") c.reward_params.d_max = to_double(full, value);
    else if (key == "v_min") c.reward_params.v_min = to_double(full, value);
    else if (key == "v_target") c.reward_params.v_target = to_double(full, value);
    else if (key == "v_max") c.reward_params.v_max = to_double(full, value);
    else throw std::invalid_argument("config: unknown key " + full);
  } else if (section == "curriculum") {
    if (key == "switch_episode") c.variant.switch_episode = to_int(full, value);
    else if (key == "traffic_max") c.variant.traffic_max = to_int(full, value);
    else if (key == "traffic_ramp_episodes") c.variant.traffic_ramp_episodes = to_int(full, value);
    else throw std::invalid_argument("config: unknown key " + full);
  } else if (section == "ppo") {
    if (key == "clip_epsilon") c.ppo.clip_epsilon = to_double(full, value);
    else if (key == "discount_gamma") c.ppo.discount_gamma = to_double(full, value);
    else if (key == "gae_lambda") c.ppo.gae_lambda = to_double(full, value);
    else if (key == "epochs") c.ppo.epochs = to_int(full, value);
    else if (key == "minibatch_size") c.ppo.minibatch_size = to_int(full, value);
    else if (key == "value_loss_scale") c.ppo.value_loss_scale = to_double(full, value);
    else if (key == "entropy_scale") c.ppo.entropy_scale = to_double(full, value);
    else if (key == "learning_rate") c.ppo.learning_rate = to_double(full, value);
    else if (key == "horizon") c.ppo.horizon = to_int(full, value);
    else if (key == "normalize_advantages") c.ppo.normalize_advantages = to_bool(full, value);
    else if (key == "policy_hidden") c.network.policy_hidden = to_int_list(full, value);
    else if (key == "value_hidden") c.network.value_hidden = to_int_list(full, value);
    else if (key == "log_std_init") c.network.log_std_init = to_double(full, value);
    else if (key == "log_std_min") c.network.log_std_min = to_double(full, value);
    else if (key == "log_std_max") c.network.log_std_max = to_double(full, value);
    else throw std::invalid_argument("config: unknown key " + full);
  } else if (section == "observation") {
    if (key == "mode") {
      if (value == "vae") c.observation.mode = ObservationMode::Vae;
      else if (value == "bypass") c.observation.mode = ObservationMode::Bypass;
      else throw std::invalid_argument("config: unknown observation mode '" + value + "'");
    } else if (key == "latent") {
      if (value == "sampled") c.observation.latent = LatentMode::Sampled;
      else if (value == "deterministic") c.observation.latent = LatentMode::Deterministic;
      else throw std::invalid_argument("config: unknown latent mode '" + value + "'");
    }
    else if (key == "raster_width") c.observation.raster.width = to_int(full, value);
    else if (key == "raster_height") c.observation.raster.height = to_int(full, value);
    else if (key == "forward_range") c.observation.raster.forward_range = to_double(full, value);
    else if (key == "back_range") c.observation.raster.back_range = to_double(full, value);
    else if (key == "lateral_half_range") c.observation.raster.lateral_half_range = to_double(full, value);
    else if (key == "traffic_gap_range") c.observation.traffic_gap_range = to_double(full, value);
    else if (key == "vae_checkpoint") c.vae_checkpoint = value;
    else throw std::invalid_argument("config: unknown key " + full);
  } else if (section == "vae") {
    if (key == "z_dim") c.vae.z_dim = to_int(full, value);
    else if (key == "encoder_hidden") c.vae.encoder_hidden = to_int_list(full, value);
    else if (key == "decoder_hidden") c.vae.decoder_hidden = to_int_list(full, value);
    else if (key == "kl_beta") c.vae.kl_beta = to_double(full, value);
    else if (key == "learning_rate") c.vae.learning_rate = to_double(full, value);
    else if (key == "batch_size") c.vae.batch_size = to_int(full, value);
    else if (key == "grad_clip_norm") c.vae.grad_clip_norm = to_double(full, value);
    else throw std::invalid_argument("config: unknown key " + full);
  } else if (section == "run") {
    if (key == "total_episodes") c.run.total_episodes = to_int(full, value);
    else if (key == "eval_every") c.run.eval_every = to_int(full, value);
    else if (key == "eval_episodes_per_point") c.run.eval_episodes_per_point = to_int(full, value);
    else if (key == "smoothing") c.run.smoothing = to_double(full, value);
    else if (key == "checkpoint_every") c.run.checkpoint_every = to_int(full, value);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_double(full, value));
    else if (key == "out_dir") c.out_dir = value;
    else throw std::invalid_argument("config: unknown key " + full);
  } else {
    throw std::invalid_argument("config: unknown section [" + section + "]");
  }
}

}  // namespace

ExperimentConfig paper_profile() {
  ExperimentConfig c;
  c.track.shape = TrackShape::Oval;
  c.track.straight_length = 100.0;
  c.track.end_radius = 20.0;
  c.observation.mode = ObservationMode::Vae;
  finalize_config(c);
  return c;
}

ExperimentConfig desk_profile() {
  ExperimentConfig c;
  c.track.shape = TrackShape::Oval;
  c.track.straight_length = 40.0;
  c.track.end_radius = 15.0;
  c.variant.switch_episode = 150;
  c.variant.traffic_max = 4;
  c.variant.traffic_ramp_episodes = 100;
  c.run.total_episodes = 400;
  c.observation.mode = ObservationMode::Bypass;
  finalize_config(c);
  return c;
}

ExperimentConfig profile_by_name(const std::string& name) {
  if (name == "paper") return paper_profile();
  if (name == "desk") return desk_profile();
  throw std::invalid_argument("unknown profile '" + name + "'");
}

void finalize_config(ExperimentConfig& config) {
  config.variant.total_episodes = config.run.total_episodes;
  config.vae.input_dim =
      config.observation.raster.width * config.observation.raster.height;
  config.env.rng_seed = config.seed;
  if (config.run.eval_every < 1)
    throw std::invalid_argument("config: eval_every must be >= 1");
  if (!(config.run.smoothing >= 0.0 && config.run.smoothing < 1.0))
    throw std::invalid_argument("config: smoothing must lie in [0, 1)");
  const auto& r = config.reward_params;
  if (!(0.0 < r.v_min && r.v_min < r.v_target && r.v_target < r.v_max))
    throw std::invalid_argument("config: need 0 < v_min < v_target < v_max");
  if (r.alpha_max <= 0.0 || r.d_max <= 0.0)
    throw std::invalid_argument("config: alpha_max and d_max must be positive");
  if (config.variant.switch_episode <= 0 ||
      config.variant.traffic_ramp_episodes < 1 || config.variant.traffic_max < 0)
    throw std::invalid_argument("config: bad curriculum parameters");
}

ExperimentConfig load_config_file(const std::string& path,
                                  const ExperimentConfig& base) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("config: cannot open " + path);

  ExperimentConfig config = base;
  std::string section;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: bad section header at line " +
                                    std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value at line " +
                                  std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (section.empty())
      throw std::invalid_argument("config: key outside any section at line " +
                                  std::to_string(line_no));
    apply_entry(config, section, key, value);
  }
  finalize_config(config);
  return config;
}

}  // namespace curla
