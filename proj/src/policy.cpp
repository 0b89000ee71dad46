#include "curla/policy.hpp"

#include <cmath>
#include <stdexcept>

#include "curla/geometry.hpp"

namespace curla {
namespace {

constexpr double kLogTwoPi = 1.8378770664093454836;  // ln(2*pi)
constexpr double kTanhCorrectionEps = 1e-6;

}  // namespace

void GaussianPolicy::clamp_log_std() {
  for (double& v : log_std) v = clamp(v, log_std_min, log_std_max);
}

GaussianPolicy make_policy(int obs_dim, int action_dim,
                           const std::vector<int>& hidden,
                           double log_std_init, Rng& rng) {
  std::vector<int> sizes;
  sizes.push_back(obs_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(action_dim);
  GaussianPolicy policy;
  policy.mean_net = Mlp::init_xavier(std::move(sizes), rng);
  policy.log_std.assign(static_cast<std::size_t>(action_dim), log_std_init);
  return policy;
}

ValueFunction make_value_function(int obs_dim, const std::vector<int>& hidden,
                                  Rng& rng) {
  std::vector<int> sizes;
  sizes.push_back(obs_dim);
  sizes.insert(sizes.end(), hidden.begin(), hidden.end());
  sizes.push_back(1);
  return ValueFunction{Mlp::init_xavier(std::move(sizes), rng)};
}

PolicySample policy_sample(const GaussianPolicy& policy,
                           std::span<const double> obs, Rng& rng) {
  const std::vector<double> mean = policy.mean_net.forward(obs);
  PolicySample sample;
  sample.pre_squash.resize(mean.size());
  sample.action.resize(mean.size());
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double sigma = std::exp(policy.log_std[i]);
    sample.pre_squash[i] = mean[i] + sigma * rng.normal();
    sample.action[i] = std::tanh(sample.pre_squash[i]);
  }
  sample.log_prob = policy_log_prob(policy, obs, sample.pre_squash);
  return sample;
}

std::vector<double> policy_mean_action(const GaussianPolicy& policy,
                                       std::span<const double> obs) {
  std::vector<double> action = policy.mean_net.forward(obs);
  for (double& a : action) a = std::tanh(a);
  return action;
}

double policy_log_prob(const GaussianPolicy& policy,
                       std::span<const double> obs,
                       std::span<const double> pre_squash) {
  if (pre_squash.size() != static_cast<std::size_t>(policy.action_dim()))
    throw std::invalid_argument("policy_log_prob: action size mismatch");
  const std::vector<double> mean = policy.mean_net.forward(obs);
  double lp = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    const double sigma = std::exp(policy.log_std[i]);
    const double z = (pre_squash[i] - mean[i]) / sigma;
    lp += -0.5 * z * z - policy.log_std[i] - 0.5 * kLogTwoPi;
    const double t = std::tanh(pre_squash[i]);
    lp -= std::log(1.0 - t * t + kTanhCorrectionEps);
  }
  return lp;
}

PolicyEval policy_eval(const GaussianPolicy& policy,
                       std::span<const double> obs,
                       std::span<const double> pre_squash) {
  if (pre_squash.size() != static_cast<std::size_t>(policy.action_dim()))
    throw std::invalid_argument("policy_eval: action size mismatch");
  PolicyEval eval;
  eval.mean = policy.mean_net.forward(obs, &eval.cache);
  for (std::size_t i = 0; i < eval.mean.size(); ++i) {
    const double sigma = std::exp(policy.log_std[i]);
    const double z = (pre_squash[i] - eval.mean[i]) / sigma;
    eval.log_prob += -0.5 * z * z - policy.log_std[i] - 0.5 * kLogTwoPi;
    const double t = std::tanh(pre_squash[i]);
    eval.log_prob -= std::log(1.0 - t * t + kTanhCorrectionEps);
  }
  return eval;
}

void policy_log_prob_backward(const GaussianPolicy& policy,
                              std::span<const double> pre_squash,
                              const PolicyEval& eval, double coeff,
                              std::span<double> mean_net_grads,
                              std::span<double> log_std_grads) {
  std::vector<double> mean_grad(eval.mean.size());
  for (std::size_t i = 0; i < eval.mean.size(); ++i) {
    const double sigma = std::exp(policy.log_std[i]);
    const double z = (pre_squash[i] - eval.mean[i]) / sigma;
    // d lp / d mean_i = z / sigma; the tanh correction is constant in theta.
    mean_grad[i] = coeff * z / sigma;
    log_std_grads[i] += coeff * (z * z - 1.0);
  }
  policy.mean_net.backward(eval.cache, mean_grad, mean_net_grads);
}

double gaussian_entropy(const GaussianPolicy& policy) {
  double h = 0.0;
  for (double ls : policy.log_std) h += ls + 0.5 * (kLogTwoPi + 1.0);
  return h;
}

}  // namespace curla
