#pragma once
#include <span>
#include <vector>

#include "curla/mlp.hpp"

namespace curla {

struct VaeConfig {
  int input_dim = 40 * 80;
  std::vector<int> encoder_hidden = {256, 128};
  std::vector<int> decoder_hidden = {128, 256};
  int z_dim = 64;
  double kl_beta = 1.0;
  double learning_rate = 1e-4;
  int batch_size = 100;
  // Cap on the L2 norm of the summed batch gradient (0 disables). Keeps the
  // latent path of raw SGD from overshooting; direction is preserved.
  double grad_clip_norm = 1000.0;
};

// Encoder maps a flattened frame to [z_mu; z_log_var]; decoder maps z to
// per-pixel logits (sigmoid applied at decode time).
struct VaeParams {
  Mlp encoder;
  Mlp decoder;
  VaeConfig config;
};

VaeParams vae_init(const VaeConfig& config, Rng& rng);

struct LatentSample {
  std::vector<double> z_mu;
  std::vector<double> z_log_var;
  std::vector<double> z;
};

// Splits the encoder output into (z_mu, z_log_var).
void vae_encode(const VaeParams& params, std::span<const double> frame,
                std::vector<double>& z_mu, std::vector<double>& z_log_var);

// z = z_mu + exp(0.5 * z_log_var) * noise; the caller supplies the noise so
// sampling stays deterministic under a seeded RNG.
std::vector<double> reparameterize(std::span<const double> z_mu,
                                   std::span<const double> z_log_var,
                                   std::span<const double> noise);

// Per-pixel reconstruction probabilities, strictly inside (0, 1).
std::vector<double> vae_decode(const VaeParams& params,
                               std::span<const double> z);

struct VaeLoss {
  double total = 0.0;
  double bce = 0.0;
  double kl = 0.0;
};

// bce summed over pixels; kl = -0.5 * sum(1 + lv - mu^2 - exp(lv));
// total = bce + kl_beta * kl.
VaeLoss vae_loss(std::span<const double> frame, std::span<const double> recon,
                 std::span<const double> z_mu,
                 std::span<const double> z_log_var, double kl_beta);

// Loss plus analytic gradients for one sample at fixed reparameterization
// noise; gradients accumulate into the encoder/decoder buffers.
VaeLoss vae_loss_and_grads(const VaeParams& params,
                           std::span<const double> frame,
                           std::span<const double> noise,
                           std::span<double> encoder_grads,
                           std::span<double> decoder_grads);

struct VaeEpochStats {
  int epoch = 0;
  double train_bce = 0.0;
  double train_kl = 0.0;
  double val_bce = 0.0;
  double val_kl = 0.0;
};

struct VaeTrainResult {
  std::vector<VaeEpochStats> history;  // one row per epoch
  double initial_val_bce = 0.0;        // evaluated before any update
  double initial_val_kl = 0.0;
};

// Minibatch gradient descent on the summed per-sample loss. The dataset is
// split 9:1 into train/validation deterministically from the RNG; validation
// uses z = z_mu. Throws on an empty dataset.
VaeTrainResult vae_train(const std::vector<std::vector<double>>& dataset,
                         VaeParams& params, int epochs, Rng& rng);

}  // namespace curla
