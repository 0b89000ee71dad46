#pragma once
#include <span>
#include <vector>

#include "curla/adam.hpp"
#include "curla/policy.hpp"

namespace curla {

struct Transition {
  std::vector<double> observation;
  std::vector<double> pre_squash_action;
  double log_prob = 0.0;  // recorded at collection time under theta_k
  double reward = 0.0;
  double value = 0.0;
  bool done = false;
};

// Fixed-capacity trajectory store; consumed only when full. Spans episode
// boundaries, with done flags masking GAE across them.
class RolloutBuffer {
 public:
  explicit RolloutBuffer(int capacity = 128);

  int capacity() const { return capacity_; }
  int size() const { return static_cast<int>(transitions_.size()); }
  bool full() const { return size() == capacity_; }

  void push(Transition transition);  // throws when already full
  void set_bootstrap_value(double v) { bootstrap_value_ = v; }
  double bootstrap_value() const { return bootstrap_value_; }
  const std::vector<Transition>& transitions() const { return transitions_; }
  void clear();

 private:
  std::vector<Transition> transitions_;
  int capacity_;
  double bootstrap_value_ = 0.0;
};

struct PpoHyper {
  double clip_epsilon = 0.2;
  double discount_gamma = 0.99;
  double gae_lambda = 0.95;
  int epochs = 3;            // K
  int minibatch_size = 32;   // M
  double value_loss_scale = 1.0;  // alpha
  double entropy_scale = 0.01;    // beta
  double learning_rate = 1e-4;
  int horizon = 128;  // T
  bool normalize_advantages = true;
};

struct GaeResult {
  std::vector<double> advantages;
  std::vector<double> returns;
};

// delta_t = r_t + gamma*V(s_{t+1})*(1-done_t) - V(s_t), accumulated backward
// with factor gamma*lambda*(1-done_t). returns_t = A_t + V(s_t).
GaeResult gae(std::span<const double> rewards, std::span<const double> values,
              std::span<const unsigned char> dones, double bootstrap_value,
              double gamma, double lambda);

// In-place shift/scale to zero mean, unit variance (epsilon 1e-8).
void normalize_advantages(std::vector<double>& advantages);

struct Minibatch {
  std::vector<const Transition*> items;
  std::vector<double> advantages;
  std::vector<double> returns;
};

struct PpoLossResult {
  double total = 0.0;
  double policy_term = 0.0;
  double value_term = 0.0;
  double entropy_term = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  std::vector<double> mean_net_grads;
  std::vector<double> log_std_grads;
  std::vector<double> value_net_grads;
};

// Clipped-surrogate PPO loss with analytic gradients:
//   total = -mean(min(rho*A, clip(rho, 1-eps, 1+eps)*A))
//           + alpha*mean((V - returns)^2) - beta*entropy
PpoLossResult ppo_loss(const GaussianPolicy& policy,
                       const ValueFunction& value_fn,
                       const Minibatch& minibatch, const PpoHyper& hyper);

struct PpoOptimizer {
  AdamState mean_net;
  AdamState log_std;
  AdamState value_net;

  PpoOptimizer(const GaussianPolicy& policy, const ValueFunction& value_fn)
      : mean_net(policy.mean_net.param_count()),
        log_std(policy.log_std.size()),
        value_net(value_fn.net.param_count()) {}
};

struct PpoUpdateStats {
  double mean_total = 0.0;
  double mean_policy = 0.0;
  double mean_value = 0.0;
  double mean_entropy = 0.0;
  double mean_ratio = 0.0;
  double clip_fraction = 0.0;
  int minibatches = 0;
};

// K epochs of RNG-shuffled minibatch Adam steps on the full buffer. GAE is
// computed once from the stored value predictions; throws unless the buffer
// is full.
PpoUpdateStats ppo_update(GaussianPolicy& policy, ValueFunction& value_fn,
                          const RolloutBuffer& buffer, const PpoHyper& hyper,
                          PpoOptimizer& optimizer, Rng& rng);

}  // namespace curla
