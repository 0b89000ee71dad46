#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "curla/geometry.hpp"
#include "curla/ppo.hpp"

using namespace curla;

namespace {

// Unrolled double-sum definition of GAE, independent of the recursion.
std::vector<double> brute_force_advantages(const std::vector<double>& rewards,
                                           const std::vector<double>& values,
                                           const std::vector<unsigned char>& dones,
                                           double bootstrap, double gamma,
                                           double lambda) {
  const std::size_t n = rewards.size();
  std::vector<double> adv(n, 0.0);
  for (std::size_t t = 0; t < n; ++t) {
    double factor = 1.0;
    for (std::size_t l = t; l < n; ++l) {
      const double next_value = (l + 1 == n) ? bootstrap : values[l + 1];
      const double mask = dones[l] ? 0.0 : 1.0;
      adv[t] += factor * (rewards[l] + gamma * next_value * mask - values[l]);
      if (dones[l]) break;
      factor *= gamma * lambda;
    }
  }
  return adv;
}

struct TinySetup {
  GaussianPolicy policy;
  ValueFunction value_fn;
  std::vector<Transition> transitions;
  Minibatch minibatch;
};

// Scalar-action, linear nets, two samples; every number chosen by hand.
TinySetup tiny_two_sample_setup() {
  TinySetup s;
  s.policy.mean_net = Mlp({1, 1});
  s.policy.mean_net.params() = {0.5, 0.1};  // w, b
  s.policy.log_std = {std::log(0.5)};
  s.value_fn.net = Mlp({1, 1});
  s.value_fn.net.params() = {0.3, -0.2};

  Transition t1;
  t1.observation = {0.4};
  t1.pre_squash_action = {0.3};
  t1.log_prob = -0.9;
  Transition t2;
  t2.observation = {-0.2};
  t2.pre_squash_action = {-0.1};
  t2.log_prob = -1.1;
  s.transitions = {t1, t2};
  s.minibatch.items = {&s.transitions[0], &s.transitions[1]};
  s.minibatch.advantages = {0.7, -0.4};
  s.minibatch.returns = {0.5, 0.2};
  return s;
}

RolloutBuffer collect_buffer(GaussianPolicy& policy, ValueFunction& value_fn,
                             Rng& rng, int capacity) {
  RolloutBuffer buffer(capacity);
  while (!buffer.full()) {
    Transition tr;
    tr.observation = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    const PolicySample sample = policy_sample(policy, tr.observation, rng);
    tr.pre_squash_action = sample.pre_squash;
    tr.log_prob = sample.log_prob;
    tr.reward = rng.uniform(-1.0, 1.0);
    tr.value = value_fn.value(tr.observation);
    tr.done = rng.uniform01() < 0.1;
    buffer.push(std::move(tr));
  }
  buffer.set_bootstrap_value(0.37);
  return buffer;
}

}  // namespace

TEST_CASE("gae with lambda = 0 collapses to one-step deltas") {
  const std::vector<double> rewards{1.0, -0.5, 2.0, 0.0};
  const std::vector<double> values{0.3, 0.1, -0.2, 0.4};
  const std::vector<unsigned char> dones{0, 1, 0, 0};
  const double gamma = 0.99, bootstrap = 0.8;
  const GaeResult result = gae(rewards, values, dones, bootstrap, gamma, 0.0);
  for (std::size_t t = 0; t < rewards.size(); ++t) {
    const double next_value = (t + 1 == rewards.size()) ? bootstrap : values[t + 1];
    const double mask = dones[t] ? 0.0 : 1.0;
    const double delta = rewards[t] + gamma * next_value * mask - values[t];
    CHECK(result.advantages[t] == delta);
    CHECK(result.returns[t] == delta + values[t]);
  }
}

TEST_CASE("gae with lambda = 1 and no dones is the discounted-sum identity") {
  Rng rng(31);
  const int n = 8;
  std::vector<double> rewards(n), values(n);
  std::vector<unsigned char> dones(n, 0);
  for (auto& r : rewards) r = rng.uniform(-1.0, 1.0);
  for (auto& v : values) v = rng.uniform(-1.0, 1.0);
  const double gamma = 0.9, bootstrap = 0.25;
  const GaeResult result = gae(rewards, values, dones, bootstrap, gamma, 1.0);
  for (int t = 0; t < n; ++t) {
    double expected = -values[static_cast<std::size_t>(t)];
    double factor = 1.0;
    for (int k = t; k < n; ++k) {
      expected += factor * rewards[static_cast<std::size_t>(k)];
      factor *= gamma;
    }
    expected += factor * bootstrap;
    CHECK(result.advantages[static_cast<std::size_t>(t)] ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("done flags cut the advantage off from later rewards") {
  std::vector<double> rewards{0.5, 1.0, -2.0, 3.0};
  const std::vector<double> values{0.0, 0.0, 0.0, 0.0};
  const std::vector<unsigned char> dones{0, 1, 0, 0};
  const GaeResult before = gae(rewards, values, dones, 1.0, 0.99, 0.95);
  rewards[2] = 100.0;
  rewards[3] = -100.0;
  const GaeResult after = gae(rewards, values, dones, 1.0, 0.99, 0.95);
  CHECK(before.advantages[0] == after.advantages[0]);
  CHECK(before.advantages[1] == after.advantages[1]);
  CHECK(before.advantages[2] != after.advantages[2]);
}

TEST_CASE("recursive gae equals the brute-force double sum") {
  Rng rng(32);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 8;
    std::vector<double> rewards(n), values(n);
    std::vector<unsigned char> dones(n);
    for (auto& r : rewards) r = rng.uniform(-2.0, 2.0);
    for (auto& v : values) v = rng.uniform(-2.0, 2.0);
    for (auto& d : dones) d = rng.uniform01() < 0.25 ? 1 : 0;
    const double gamma = rng.uniform(0.8, 1.0);
    const double lambda = rng.uniform(0.0, 1.0);
    const double bootstrap = rng.uniform(-1.0, 1.0);
    const GaeResult result = gae(rewards, values, dones, bootstrap, gamma, lambda);
    const std::vector<double> expected =
        brute_force_advantages(rewards, values, dones, bootstrap, gamma, lambda);
    for (int t = 0; t < n; ++t)
      CHECK(std::abs(result.advantages[static_cast<std::size_t>(t)] -
                     expected[static_cast<std::size_t>(t)]) < 1e-10);
  }
}

TEST_CASE("advantage normalization yields zero mean and unit variance") {
  Rng rng(33);
  std::vector<double> adv(128);
  for (auto& a : adv) a = rng.uniform(-5.0, 3.0);
  normalize_advantages(adv);
  double mean = 0.0, var = 0.0;
  for (double a : adv) mean += a;
  mean /= static_cast<double>(adv.size());
  for (double a : adv) var += (a - mean) * (a - mean);
  var /= static_cast<double>(adv.size());
  CHECK(std::abs(mean) < 1e-12);
  CHECK(var == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("rollout buffer contract") {
  RolloutBuffer buffer(4);
  CHECK_FALSE(buffer.full());
  for (int i = 0; i < 4; ++i) buffer.push(Transition{});
  CHECK(buffer.full());
  CHECK_THROWS_AS(buffer.push(Transition{}), std::logic_error);
  buffer.clear();
  CHECK(buffer.size() == 0);
}

TEST_CASE("ratio identity at the collection policy") {
  Rng init(34), rng(35);
  GaussianPolicy policy = make_policy(2, 2, {8}, std::log(0.4), init);
  ValueFunction value_fn = make_value_function(2, {8}, init);
  const RolloutBuffer buffer = collect_buffer(policy, value_fn, rng, 32);

  for (const Transition& tr : buffer.transitions()) {
    const double lp = policy_log_prob(policy, tr.observation, tr.pre_squash_action);
    CHECK(std::abs(std::exp(lp - tr.log_prob) - 1.0) <= 1e-12);
  }

  Minibatch mb;
  double adv_mean = 0.0;
  Rng arng(36);
  for (const Transition& tr : buffer.transitions()) {
    mb.items.push_back(&tr);
    mb.advantages.push_back(arng.uniform(-1.0, 1.0));
    mb.returns.push_back(arng.uniform(-1.0, 1.0));
    adv_mean += mb.advantages.back();
  }
  adv_mean /= static_cast<double>(mb.items.size());
  PpoHyper hyper;
  const PpoLossResult loss = ppo_loss(policy, value_fn, mb, hyper);
  CHECK(std::abs(loss.policy_term - (-adv_mean)) <= 1e-12);
  CHECK(loss.mean_ratio == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(loss.clip_fraction == 0.0);
}

TEST_CASE("clip saturation zeroes the policy gradient") {
  Rng init(37);
  GaussianPolicy policy = make_policy(2, 2, {6}, std::log(0.4), init);
  ValueFunction value_fn = make_value_function(2, {6}, init);
  PpoHyper hyper;

  Transition tr;
  tr.observation = {0.5, -0.5};
  Rng rng(38);
  const PolicySample sample = policy_sample(policy, tr.observation, rng);
  tr.pre_squash_action = sample.pre_squash;
  // Force ratio = 1 + 2*eps > 1 + eps with a positive advantage.
  tr.log_prob = sample.log_prob - std::log(1.0 + 2.0 * hyper.clip_epsilon);

  Minibatch mb;
  mb.items = {&tr};
  mb.advantages = {1.5};
  mb.returns = {0.0};
  const PpoLossResult loss = ppo_loss(policy, value_fn, mb, hyper);
  CHECK(loss.clip_fraction == 1.0);
  for (double g : loss.mean_net_grads) CHECK(g == 0.0);
  // Only the entropy term touches log_std here.
  for (double g : loss.log_std_grads)
    CHECK(g == doctest::Approx(-hyper.entropy_scale).epsilon(1e-12));
  // The clipped surrogate value itself: -(1+eps)*A.
  CHECK(loss.policy_term ==
        doctest::Approx(-(1.0 + hyper.clip_epsilon) * 1.5).epsilon(1e-9));
}

TEST_CASE("two-sample minibatch matches hand arithmetic") {
  TinySetup s = tiny_two_sample_setup();
  PpoHyper hyper;

  // Sample 1: mean = 0.5*0.4 + 0.1 = 0.3, u = 0.3, sigma = 0.5.
  const double log_two_pi = std::log(2.0 * kPi);
  auto log_prob = [&](double u, double mean) {
    const double z = (u - mean) / 0.5;
    const double t = std::tanh(u);
    return -0.5 * z * z - std::log(0.5) - 0.5 * log_two_pi -
           std::log(1.0 - t * t + 1e-6);
  };
  const double lp1 = log_prob(0.3, 0.3);
  const double lp2 = log_prob(-0.1, 0.0);
  const double rho1 = std::exp(lp1 - (-0.9));
  const double rho2 = std::exp(lp2 - (-1.1));
  auto surrogate = [&](double rho, double adv) {
    const double clipped = std::min(std::max(rho, 0.8), 1.2) * adv;
    return std::min(rho * adv, clipped);
  };
  const double policy_term =
      -surrogate(rho1, 0.7) * 0.5 - surrogate(rho2, -0.4) * 0.5;
  const double v1 = 0.3 * 0.4 - 0.2, v2 = 0.3 * -0.2 - 0.2;
  const double value_term =
      (v1 - 0.5) * (v1 - 0.5) * 0.5 + (v2 - 0.2) * (v2 - 0.2) * 0.5;
  const double entropy = std::log(0.5) + 0.5 * (log_two_pi + 1.0);
  const double total = policy_term + 1.0 * value_term - 0.01 * entropy;

  const PpoLossResult loss = ppo_loss(s.policy, s.value_fn, s.minibatch, hyper);
  CHECK(std::abs(loss.policy_term - policy_term) <= 1e-12);
  CHECK(std::abs(loss.value_term - value_term) <= 1e-12);
  CHECK(std::abs(loss.entropy_term - entropy) <= 1e-12);
  CHECK(std::abs(loss.total - total) <= 1e-12);
}

TEST_CASE("ppo loss gradients match central finite differences") {
  TinySetup s = tiny_two_sample_setup();
  PpoHyper hyper;
  const PpoLossResult loss = ppo_loss(s.policy, s.value_fn, s.minibatch, hyper);

  const double h = 1e-5;
  auto total_at = [&]() {
    return ppo_loss(s.policy, s.value_fn, s.minibatch, hyper).total;
  };
  auto check_grad = [&](std::vector<double>& params, const std::vector<double>& grads) {
    for (std::size_t p = 0; p < params.size(); ++p) {
      const double saved = params[p];
      params[p] = saved + h;
      const double plus = total_at();
      params[p] = saved - h;
      const double minus = total_at();
      params[p] = saved;
      const double fd = (plus - minus) / (2.0 * h);
      const double denom = std::max({std::abs(fd), std::abs(grads[p]), 1e-6});
      CHECK(std::abs(grads[p] - fd) / denom < 1e-4);
    }
  };
  check_grad(s.policy.mean_net.params(), loss.mean_net_grads);
  check_grad(s.policy.log_std, loss.log_std_grads);
  check_grad(s.value_fn.net.params(), loss.value_net_grads);
}

TEST_CASE("ppo_loss rejects an empty minibatch; ppo_update needs a full buffer") {
  TinySetup s = tiny_two_sample_setup();
  PpoHyper hyper;
  Minibatch empty;
  CHECK_THROWS_AS(ppo_loss(s.policy, s.value_fn, empty, hyper),
                  std::invalid_argument);

  Rng init(40), rng(41);
  GaussianPolicy policy = make_policy(2, 2, {8}, std::log(0.4), init);
  ValueFunction value_fn = make_value_function(2, {8}, init);
  PpoOptimizer optimizer(policy, value_fn);
  RolloutBuffer buffer(8);
  buffer.push(Transition{});
  CHECK_THROWS_AS(ppo_update(policy, value_fn, buffer, hyper, optimizer, rng),
                  std::logic_error);
}

TEST_CASE("zero learning rate leaves parameters unchanged and ratios at 1") {
  Rng init(42), rng(43);
  GaussianPolicy policy = make_policy(2, 2, {8}, std::log(0.4), init);
  ValueFunction value_fn = make_value_function(2, {8}, init);
  const RolloutBuffer buffer = collect_buffer(policy, value_fn, rng, 64);

  const std::vector<double> mean_before = policy.mean_net.params();
  const std::vector<double> value_before = value_fn.net.params();
  PpoHyper hyper;
  hyper.learning_rate = 0.0;
  hyper.minibatch_size = 16;
  PpoOptimizer optimizer(policy, value_fn);
  Rng update_rng(44);
  const PpoUpdateStats stats =
      ppo_update(policy, value_fn, buffer, hyper, optimizer, update_rng);
  CHECK(policy.mean_net.params() == mean_before);
  CHECK(value_fn.net.params() == value_before);
  CHECK(stats.mean_ratio == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ppo_update is deterministic for a fixed seed") {
  PpoHyper hyper;
  hyper.minibatch_size = 16;
  auto run_once = [&]() {
    Rng init(45), rng(46);
    GaussianPolicy policy = make_policy(2, 2, {8}, std::log(0.4), init);
    ValueFunction value_fn = make_value_function(2, {8}, init);
    const RolloutBuffer buffer = collect_buffer(policy, value_fn, rng, 64);
    PpoOptimizer optimizer(policy, value_fn);
    Rng update_rng(47);
    ppo_update(policy, value_fn, buffer, hyper, optimizer, update_rng);
    return std::pair{policy.mean_net.params(), value_fn.net.params()};
  };
  const auto a = run_once();
  const auto b = run_once();
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
}

TEST_CASE("one small adam step does not worsen the loss on the same data") {
  Rng init(48), rng(49);
  GaussianPolicy policy = make_policy(2, 2, {8}, std::log(0.4), init);
  ValueFunction value_fn = make_value_function(2, {8}, init);
  const RolloutBuffer buffer = collect_buffer(policy, value_fn, rng, 32);

  Minibatch mb;
  const GaeResult estimate = [&] {
    std::vector<double> rewards, values;
    std::vector<unsigned char> dones;
    for (const auto& tr : buffer.transitions()) {
      rewards.push_back(tr.reward);
      values.push_back(tr.value);
      dones.push_back(tr.done ? 1 : 0);
    }
    return gae(rewards, values, dones, buffer.bootstrap_value(), 0.99, 0.95);
  }();
  for (std::size_t i = 0; i < buffer.transitions().size(); ++i) {
    mb.items.push_back(&buffer.transitions()[i]);
    mb.advantages.push_back(estimate.advantages[i]);
    mb.returns.push_back(estimate.returns[i]);
  }

  PpoHyper hyper;
  const double lr = 1e-7;
  const PpoLossResult before = ppo_loss(policy, value_fn, mb, hyper);
  PpoOptimizer optimizer(policy, value_fn);
  adam_step(policy.mean_net.params(), before.mean_net_grads, optimizer.mean_net, lr);
  adam_step(policy.log_std, before.log_std_grads, optimizer.log_std, lr);
  adam_step(value_fn.net.params(), before.value_net_grads, optimizer.value_net, lr);
  const PpoLossResult after = ppo_loss(policy, value_fn, mb, hyper);
  CHECK(after.total <= before.total + 1e-9);
}

TEST_CASE("bandit sign test: mean action moves toward positive advantage") {
  Rng init(50), rng(51), update_rng(52);
  GaussianPolicy policy = make_policy(1, 1, {}, std::log(0.4), init);
  ValueFunction value_fn = make_value_function(1, {8}, init);
  PpoHyper hyper;
  hyper.learning_rate = 1e-3;
  PpoOptimizer optimizer(policy, value_fn);

  const std::vector<double> obs{1.0};
  const double initial = policy_mean_action(policy, obs)[0];
  for (int update = 0; update < 50; ++update) {
    RolloutBuffer buffer(hyper.horizon);
    while (!buffer.full()) {
      Transition tr;
      tr.observation = obs;
      const PolicySample sample = policy_sample(policy, obs, rng);
      tr.pre_squash_action = sample.pre_squash;
      tr.log_prob = sample.log_prob;
      tr.reward = sample.action[0];  // reward favors action +1
      tr.value = value_fn.value(obs);
      tr.done = true;
      buffer.push(std::move(tr));
    }
    buffer.set_bootstrap_value(0.0);
    ppo_update(policy, value_fn, buffer, hyper, optimizer, update_rng);
  }
  const double final_mean = policy_mean_action(policy, obs)[0];
  CHECK(final_mean > initial + 0.3);
}
