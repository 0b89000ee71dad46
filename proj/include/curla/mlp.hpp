#pragma once
#include <cstddef>
#include <span>
#include <vector>

#include "curla/rng.hpp"

namespace curla {

// Activations recorded during a forward pass; activations[0] is the input,
// activations[l+1] the post-activation output of layer l.
struct MlpCache {
  std::vector<std::vector<double>> activations;
};

// Fully connected stack, tanh hidden activations, identity output. Parameters
// live in one flat 64-bit buffer (per-layer weights then biases) so Adam and
// checkpointing can treat them uniformly.
class Mlp {
 public:
  Mlp() = default;
  explicit Mlp(std::vector<int> layer_sizes);

  // Xavier-uniform weights, zero biases; the final layer is scaled by
  // final_layer_scale (small values keep initial outputs near zero).
  static Mlp init_xavier(std::vector<int> layer_sizes, Rng& rng,
                         double final_layer_scale = 1.0);

  const std::vector<int>& layer_sizes() const { return sizes_; }
  int input_dim() const { return sizes_.front(); }
  int output_dim() const { return sizes_.back(); }
  int layer_count() const { return static_cast<int>(sizes_.size()) - 1; }

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t param_count() const { return params_.size(); }

  std::size_t weight_offset(int layer) const { return offsets_[2 * layer]; }
  std::size_t bias_offset(int layer) const { return offsets_[2 * layer + 1]; }

  // Forward pass; fills cache (when given) for a later backward().
  std::vector<double> forward(std::span<const double> input,
                              MlpCache* cache = nullptr) const;

  // Exact reverse-mode gradients of the cached forward map. Parameter
  // gradients accumulate into param_grads (same layout as params());
  // the return value is the gradient with respect to the input.
  std::vector<double> backward(const MlpCache& cache,
                               std::span<const double> output_grad,
                               std::span<double> param_grads) const;

  static std::size_t param_count_for(const std::vector<int>& layer_sizes);

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> offsets_;  // weight, bias offset per layer
  std::vector<double> params_;
};

}  // namespace curla
