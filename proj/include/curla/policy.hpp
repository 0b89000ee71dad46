#pragma once
#include <span>
#include <vector>

#include "curla/mlp.hpp"

namespace curla {

// Diagonal-Gaussian policy over pre-squash actions; the environment sees
// tanh of the sample. log_std is state-independent and learned.
struct GaussianPolicy {
  Mlp mean_net;
  std::vector<double> log_std;
  double log_std_min = -5.0;
  double log_std_max = 1.0;

  int action_dim() const { return mean_net.output_dim(); }
  int obs_dim() const { return mean_net.input_dim(); }
  void clamp_log_std();
};

GaussianPolicy make_policy(int obs_dim, int action_dim,
                           const std::vector<int>& hidden,
                           double log_std_init, Rng& rng);

struct ValueFunction {
  Mlp net;  // obs_dim -> 1

  double value(std::span<const double> obs, MlpCache* cache = nullptr) const {
    return net.forward(obs, cache)[0];
  }
};

ValueFunction make_value_function(int obs_dim, const std::vector<int>& hidden,
                                  Rng& rng);

struct PolicySample {
  std::vector<double> action;      // tanh-squashed, each in [-1, 1]
  std::vector<double> pre_squash;  // u; stored for exact re-evaluation
  double log_prob = 0.0;
};

PolicySample policy_sample(const GaussianPolicy& policy,
                           std::span<const double> obs, Rng& rng);

// Deterministic action tanh(mean), used for evaluation episodes.
std::vector<double> policy_mean_action(const GaussianPolicy& policy,
                                       std::span<const double> obs);

// Log-density of the stored pre-squash action u under the current policy,
// including the tanh change-of-variables correction.
double policy_log_prob(const GaussianPolicy& policy,
                       std::span<const double> obs,
                       std::span<const double> pre_squash);

// Forward pass retaining what a later gradient call needs.
struct PolicyEval {
  MlpCache cache;
  std::vector<double> mean;
  double log_prob = 0.0;
};

PolicyEval policy_eval(const GaussianPolicy& policy,
                       std::span<const double> obs,
                       std::span<const double> pre_squash);

// Accumulates coeff * d(log_prob)/d(params) into the given buffers. u is
// treated as a constant, as in the PPO surrogate.
void policy_log_prob_backward(const GaussianPolicy& policy,
                              std::span<const double> pre_squash,
                              const PolicyEval& eval, double coeff,
                              std::span<double> mean_net_grads,
                              std::span<double> log_std_grads);

// Sum over dimensions of log_std + 0.5*ln(2*pi*e); independent of the state.
double gaussian_entropy(const GaussianPolicy& policy);

}  // namespace curla
