#include "curla/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "curla/kernels.hpp"

namespace curla {

Mlp::Mlp(std::vector<int> layer_sizes) : sizes_(std::move(layer_sizes)) {
  if (sizes_.size() < 2)
    throw std::invalid_argument("mlp needs at least input and output sizes");
  for (int s : sizes_)
    if (s <= 0) throw std::invalid_argument("layer sizes must be positive");

  std::size_t offset = 0;
  for (int l = 0; l < layer_count(); ++l) {
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(sizes_[l + 1]) * sizes_[l];
    offsets_.push_back(offset);
    offset += static_cast<std::size_t>(sizes_[l + 1]);
  }
  params_.assign(offset, 0.0);
}

std::size_t Mlp::param_count_for(const std::vector<int>& layer_sizes) {
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    n += static_cast<std::size_t>(layer_sizes[l + 1]) * (layer_sizes[l] + 1);
  return n;
}

Mlp Mlp::init_xavier(std::vector<int> layer_sizes, Rng& rng,
                     double final_layer_scale) {
  Mlp net(std::move(layer_sizes));
  for (int l = 0; l < net.layer_count(); ++l) {
    const int fan_in = net.sizes_[l];
    const int fan_out = net.sizes_[l + 1];
    double bound = std::sqrt(6.0 / (fan_in + fan_out));
    if (l == net.layer_count() - 1) bound *= final_layer_scale;
    double* w = net.params_.data() + net.weight_offset(l);
    const std::size_t count = static_cast<std::size_t>(fan_out) * fan_in;
    for (std::size_t i = 0; i < count; ++i) w[i] = rng.uniform(-bound, bound);
  }
  return net;
}

std::vector<double> Mlp::forward(std::span<const double> input,
                                 MlpCache* cache) const {
  if (static_cast<int>(input.size()) != input_dim())
    throw std::invalid_argument("mlp forward: input dimension mismatch");

  if (cache) {
    cache->activations.clear();
    cache->activations.emplace_back(input.begin(), input.end());
  }
  std::vector<double> current(input.begin(), input.end());
  std::vector<double> next;
  for (int l = 0; l < layer_count(); ++l) {
    next.assign(static_cast<std::size_t>(sizes_[l + 1]), 0.0);
    kernels::affine(params_.data() + weight_offset(l),
                    params_.data() + bias_offset(l), current.data(),
                    next.data(), sizes_[l + 1], sizes_[l]);
    if (l != layer_count() - 1)
      for (double& v : next) v = std::tanh(v);
    if (cache) cache->activations.push_back(next);
    current = std::move(next);
  }
  return current;
}

std::vector<double> Mlp::backward(const MlpCache& cache,
                                  std::span<const double> output_grad,
                                  std::span<double> param_grads) const {
  if (cache.activations.size() != static_cast<std::size_t>(layer_count()) + 1)
    throw std::invalid_argument("mlp backward: missing forward cache");
  if (static_cast<int>(output_grad.size()) != output_dim())
    throw std::invalid_argument("mlp backward: output gradient size mismatch");
  if (param_grads.size() != params_.size())
    throw std::invalid_argument("mlp backward: gradient buffer size mismatch");

  std::vector<double> grad(output_grad.begin(), output_grad.end());
  std::vector<double> input_grad;
  for (int l = layer_count() - 1; l >= 0; --l) {
    if (l != layer_count() - 1) {
      // grad arrives w.r.t. tanh output; convert to pre-activation.
      const auto& act = cache.activations[static_cast<std::size_t>(l) + 1];
      for (std::size_t i = 0; i < grad.size(); ++i)
        grad[i] *= 1.0 - act[i] * act[i];
    }
    const auto& layer_input = cache.activations[static_cast<std::size_t>(l)];
    input_grad.assign(layer_input.size(), 0.0);
    kernels::affine_backward(params_.data() + weight_offset(l),
                             layer_input.data(), grad.data(),
                             param_grads.data() + weight_offset(l),
                             param_grads.data() + bias_offset(l),
                             input_grad.data(), sizes_[l + 1], sizes_[l]);
    grad = input_grad;
  }
  return grad;
}

}  // namespace curla
