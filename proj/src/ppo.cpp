#include "curla/ppo.hpp"

#include <cmath>
#include <stdexcept>

#include "curla/geometry.hpp"
#include "curla/kernels.hpp"

namespace curla {

RolloutBuffer::RolloutBuffer(int capacity) : capacity_(capacity) {
  if (capacity <= 0) throw std::invalid_argument("buffer capacity must be > 0");
  transitions_.reserve(static_cast<std::size_t>(capacity));
}

void RolloutBuffer::push(Transition transition) {
  if (full()) throw std::logic_error("rollout buffer is full");
  transitions_.push_back(std::move(transition));
}

void RolloutBuffer::clear() {
  transitions_.clear();
  bootstrap_value_ = 0.0;
}

GaeResult gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const unsigned char> dones, double bootstrap_value,
              double gamma, double lambda) {
  const std::size_t n = rewards.size();
  if (values.size() != n || dones.size() != n)
    throw std::invalid_argument("gae: input length mismatch");

  GaeResult result;
  result.advantages.assign(n, 0.0);
  result.returns.assign(n, 0.0);
  double next_advantage = 0.0;
  for (std::size_t idx = n; idx-- > 0;) {
    const double mask = dones[idx] ? 0.0 : 1.0;
    const double next_value = (idx + 1 == n) ? bootstrap_value : values[idx + 1];
    const double delta = rewards[idx] + gamma * next_value * mask - values[idx];
    next_advantage = delta + gamma * lambda * mask * next_advantage;
    result.advantages[idx] = next_advantage;
    result.returns[idx] = next_advantage + values[idx];
  }
  return result;
}

void normalize_advantages(std::vector<double>& advantages) {
  if (advantages.empty()) return;
  const double n = static_cast<double>(advantages.size());
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= n;
  double var = 0.0;
  for (double a : advantages) var += (a - mean) * (a - mean);
  var /= n;
  const double inv = 1.0 / (std::sqrt(var) + 1e-8);
  for (double& a : advantages) a = (a - mean) * inv;
}

PpoLossResult ppo_loss(const GaussianPolicy& policy,
                       const ValueFunction& value_fn,
                       const Minibatch& minibatch, const PpoHyper& hyper) {
  const int count = static_cast<int>(minibatch.items.size());
  if (count == 0) throw std::invalid_argument("ppo_loss: empty minibatch");
  if (minibatch.advantages.size() != minibatch.items.size() ||
      minibatch.returns.size() != minibatch.items.size())
    throw std::invalid_argument("ppo_loss: minibatch column length mismatch");

  const std::size_t mean_params = policy.mean_net.param_count();
  const std::size_t std_params = policy.log_std.size();
  const std::size_t value_params = value_fn.net.param_count();
  const double inv_count = 1.0 / static_cast<double>(count);
  const double eps = hyper.clip_epsilon;

  // Per-chunk accumulators reduced in fixed chunk order below; this keeps
  // the result independent of the kernel backend.
  struct ChunkAccum {
    std::vector<double> mean_grads, std_grads, value_grads;
    double policy_term = 0.0, value_term = 0.0;
    double ratio_sum = 0.0;
    int clipped = 0;
  };
  std::vector<ChunkAccum> chunks(kernels::kGradChunks);
  for (auto& c : chunks) {
    c.mean_grads.assign(mean_params, 0.0);
    c.std_grads.assign(std_params, 0.0);
    c.value_grads.assign(value_params, 0.0);
  }

  kernels::for_each_chunk(count, [&](int chunk, int begin, int end) {
    ChunkAccum& acc = chunks[static_cast<std::size_t>(chunk)];
    for (int i = begin; i < end; ++i) {
      const Transition& tr = *minibatch.items[static_cast<std::size_t>(i)];
      const double advantage = minibatch.advantages[static_cast<std::size_t>(i)];
      const double ret = minibatch.returns[static_cast<std::size_t>(i)];

      const PolicyEval eval =
          policy_eval(policy, tr.observation, tr.pre_squash_action);
      const double ratio = std::exp(eval.log_prob - tr.log_prob);
      const double clipped_ratio = clamp(ratio, 1.0 - eps, 1.0 + eps);
      const double unclipped = ratio * advantage;
      const double clipped = clipped_ratio * advantage;
      acc.policy_term += -std::min(unclipped, clipped) * inv_count;
      acc.ratio_sum += ratio;
      if (std::abs(ratio - 1.0) > eps) acc.clipped += 1;

      // Gradient flows through the unclipped branch only when it attains
      // the min; at equality both derivatives coincide inside the band.
      if (unclipped <= clipped) {
        const double coeff = -advantage * ratio * inv_count;
        policy_log_prob_backward(policy, tr.pre_squash_action, eval, coeff,
                                 acc.mean_grads, acc.std_grads);
      }

      MlpCache value_cache;
      const double v = value_fn.value(tr.observation, &value_cache);
      acc.value_term += (v - ret) * (v - ret) * inv_count;
      const double dv[1] = {2.0 * (v - ret) * inv_count * hyper.value_loss_scale};
      value_fn.net.backward(value_cache, dv, acc.value_grads);
    }
  });

  PpoLossResult result;
  result.mean_net_grads.assign(mean_params, 0.0);
  result.log_std_grads.assign(std_params, 0.0);
  result.value_net_grads.assign(value_params, 0.0);
  int clipped_total = 0;
  for (const auto& acc : chunks) {
    result.policy_term += acc.policy_term;
    result.value_term += acc.value_term;
    result.mean_ratio += acc.ratio_sum;
    clipped_total += acc.clipped;
    for (std::size_t j = 0; j < mean_params; ++j)
      result.mean_net_grads[j] += acc.mean_grads[j];
    for (std::size_t j = 0; j < std_params; ++j)
      result.log_std_grads[j] += acc.std_grads[j];
    for (std::size_t j = 0; j < value_params; ++j)
      result.value_net_grads[j] += acc.value_grads[j];
  }
  result.mean_ratio *= inv_count;
  result.clip_fraction = static_cast<double>(clipped_total) * inv_count;
  result.entropy_term = gaussian_entropy(policy);
  result.total = result.policy_term + hyper.value_loss_scale * result.value_term -
                 hyper.entropy_scale * result.entropy_term;
  // Entropy depends only on log_std: d total / d log_std_i -= beta.
  for (double& g : result.log_std_grads) g -= hyper.entropy_scale;
  return result;
}

namespace {

void shuffle_indices(std::vector<int>& indices, Rng& rng) {
  for (int i = static_cast<int>(indices.size()) - 1; i > 0; --i) {
    const int j = rng.uniform_int(0, i);
    std::swap(indices[static_cast<std::size_t>(i)],
              indices[static_cast<std::size_t>(j)]);
  }
}

}  // namespace

PpoUpdateStats ppo_update(GaussianPolicy& policy, ValueFunction& value_fn,
                          const RolloutBuffer& buffer, const PpoHyper& hyper,
                          PpoOptimizer& optimizer, Rng& rng) {
  if (!buffer.full())
    throw std::logic_error("ppo_update: rollout buffer not full");

  const auto& transitions = buffer.transitions();
  const std::size_t n = transitions.size();
  std::vector<double> rewards(n), values(n);
  std::vector<unsigned char> dones(n);
  for (std::size_t i = 0; i < n; ++i) {
    rewards[i] = transitions[i].reward;
    values[i] = transitions[i].value;
    dones[i] = transitions[i].done ? 1 : 0;
  }
  GaeResult estimate = gae(rewards, values, dones, buffer.bootstrap_value(),
                           hyper.discount_gamma, hyper.gae_lambda);
  if (hyper.normalize_advantages) normalize_advantages(estimate.advantages);

  std::vector<int> indices(n);
  for (std::size_t i = 0; i < n; ++i) indices[i] = static_cast<int>(i);

  PpoUpdateStats stats;
  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    shuffle_indices(indices, rng);
    for (std::size_t start = 0; start < n; start += hyper.minibatch_size) {
      const std::size_t stop =
          std::min(n, start + static_cast<std::size_t>(hyper.minibatch_size));
      Minibatch mb;
      for (std::size_t k = start; k < stop; ++k) {
        const auto idx = static_cast<std::size_t>(indices[k]);
        mb.items.push_back(&transitions[idx]);
        mb.advantages.push_back(estimate.advantages[idx]);
        mb.returns.push_back(estimate.returns[idx]);
      }
      PpoLossResult loss = ppo_loss(policy, value_fn, mb, hyper);
      adam_step(policy.mean_net.params(), loss.mean_net_grads,
                optimizer.mean_net, hyper.learning_rate);
      adam_step(policy.log_std, loss.log_std_grads, optimizer.log_std,
                hyper.learning_rate);
      policy.clamp_log_std();
      adam_step(value_fn.net.params(), loss.value_net_grads,
                optimizer.value_net, hyper.learning_rate);

      stats.mean_total += loss.total;
      stats.mean_policy += loss.policy_term;
      stats.mean_value += loss.value_term;
      stats.mean_entropy += loss.entropy_term;
      stats.mean_ratio += loss.mean_ratio;
      stats.clip_fraction += loss.clip_fraction;
      stats.minibatches += 1;
    }
  }
  const double inv = 1.0 / static_cast<double>(stats.minibatches);
  stats.mean_total *= inv;
  stats.mean_policy *= inv;
  stats.mean_value *= inv;
  stats.mean_entropy *= inv;
  stats.mean_ratio *= inv;
  stats.clip_fraction *= inv;
  return stats;
}

}  // namespace curla
