#include "curla/vae.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curla {
namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// The log-variance head is squashed to (-kLogVarBound, kLogVarBound) with a
// smooth tanh; raw SGD on the summed batch loss diverges through exp(lv)
// otherwise.
constexpr double kLogVarBound = 8.0;

double bound_log_var(double raw) {
  return kLogVarBound * std::tanh(raw / kLogVarBound);
}

double bound_log_var_grad(double bounded) {
  const double t = bounded / kLogVarBound;
  return 1.0 - t * t;
}

std::vector<int> encoder_sizes(const VaeConfig& c) {
  std::vector<int> sizes{c.input_dim};
  sizes.insert(sizes.end(), c.encoder_hidden.begin(), c.encoder_hidden.end());
  sizes.push_back(2 * c.z_dim);
  return sizes;
}

std::vector<int> decoder_sizes(const VaeConfig& c) {
  std::vector<int> sizes{c.z_dim};
  sizes.insert(sizes.end(), c.decoder_hidden.begin(), c.decoder_hidden.end());
  sizes.push_back(c.input_dim);
  return sizes;
}

}  // namespace

VaeParams vae_init(const VaeConfig& config, Rng& rng) {
  VaeParams params;
  params.config = config;
  // Small output heads start mu/log_var and the logits near zero, inside the
  // stable region of the summed-batch SGD dynamics.
  params.encoder = Mlp::init_xavier(encoder_sizes(config), rng, 0.01);
  params.decoder = Mlp::init_xavier(decoder_sizes(config), rng, 0.01);
  return params;
}

void vae_encode(const VaeParams& params, std::span<const double> frame,
                std::vector<double>& z_mu, std::vector<double>& z_log_var) {
  if (static_cast<int>(frame.size()) != params.config.input_dim)
    throw std::invalid_argument("vae_encode: frame dimension mismatch");
  const std::vector<double> out = params.encoder.forward(frame);
  const std::size_t z = static_cast<std::size_t>(params.config.z_dim);
  z_mu.assign(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(z));
  z_log_var.resize(z);
  for (std::size_t i = 0; i < z; ++i) z_log_var[i] = bound_log_var(out[z + i]);
}

std::vector<double> reparameterize(std::span<const double> z_mu,
                                   std::span<const double> z_log_var,
                                   std::span<const double> noise) {
  if (z_mu.size() != z_log_var.size() || z_mu.size() != noise.size())
    throw std::invalid_argument("reparameterize: length mismatch");
  std::vector<double> z(z_mu.size());
  for (std::size_t i = 0; i < z.size(); ++i)
    z[i] = z_mu[i] + std::exp(0.5 * z_log_var[i]) * noise[i];
  return z;
}

std::vector<double> vae_decode(const VaeParams& params,
                               std::span<const double> z) {
  if (static_cast<int>(z.size()) != params.config.z_dim)
    throw std::invalid_argument("vae_decode: latent dimension mismatch");
  std::vector<double> out = params.decoder.forward(z);
  for (double& v : out) v = sigmoid(v);
  return out;
}

VaeLoss vae_loss(std::span<const double> frame, std::span<const double> recon,
                 std::span<const double> z_mu,
                 std::span<const double> z_log_var, double kl_beta) {
  if (frame.size() != recon.size())
    throw std::invalid_argument("vae_loss: frame/recon shape mismatch");
  if (z_mu.size() != z_log_var.size())
    throw std::invalid_argument("vae_loss: latent shape mismatch");

  VaeLoss loss;
  for (std::size_t i = 0; i < frame.size(); ++i) {
    const double p = recon[i];
    if (!(p > 0.0 && p < 1.0))
      throw std::invalid_argument("vae_loss: recon values must lie in (0, 1)");
    loss.bce -= frame[i] * std::log(p) + (1.0 - frame[i]) * std::log(1.0 - p);
  }
  for (std::size_t i = 0; i < z_mu.size(); ++i) {
    loss.kl += -0.5 * (1.0 + z_log_var[i] - z_mu[i] * z_mu[i] -
                       std::exp(z_log_var[i]));
  }
  loss.total = loss.bce + kl_beta * loss.kl;
  return loss;
}

VaeLoss vae_loss_and_grads(const VaeParams& params,
                           std::span<const double> frame,
                           std::span<const double> noise,
                           std::span<double> encoder_grads,
                           std::span<double> decoder_grads) {
  const int z_dim = params.config.z_dim;
  if (static_cast<int>(noise.size()) != z_dim)
    throw std::invalid_argument("vae_loss_and_grads: noise length mismatch");

  MlpCache enc_cache;
  const std::vector<double> enc_out = params.encoder.forward(frame, &enc_cache);
  std::span<const double> z_mu(enc_out.data(), static_cast<std::size_t>(z_dim));
  std::vector<double> z_log_var(static_cast<std::size_t>(z_dim));
  for (int i = 0; i < z_dim; ++i)
    z_log_var[static_cast<std::size_t>(i)] = bound_log_var(enc_out[static_cast<std::size_t>(z_dim + i)]);
  const std::vector<double> z = reparameterize(z_mu, z_log_var, noise);

  MlpCache dec_cache;
  const std::vector<double> logits = params.decoder.forward(z, &dec_cache);

  VaeLoss loss;
  std::vector<double> logit_grad(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i) {
    const double p = sigmoid(logits[i]);
    const double x = frame[i];
    // Stable BCE-with-logits: log(1+e^l) - x*l.
    const double l = logits[i];
    loss.bce += (l > 0.0 ? l + std::log1p(std::exp(-l)) : std::log1p(std::exp(l))) -
                x * l;
    logit_grad[i] = p - x;
  }
  const std::vector<double> dz =
      params.decoder.backward(dec_cache, logit_grad, decoder_grads);

  const double beta = params.config.kl_beta;
  std::vector<double> enc_grad(enc_out.size());
  for (int i = 0; i < z_dim; ++i) {
    const std::size_t iu = static_cast<std::size_t>(i);
    loss.kl += -0.5 * (1.0 + z_log_var[iu] - z_mu[iu] * z_mu[iu] -
                       std::exp(z_log_var[iu]));
    // Through the reparameterization: dz/dmu = 1, dz/dlv = 0.5*sigma*noise;
    // then through the tanh bound on the raw log-var output.
    enc_grad[iu] = dz[iu] + beta * z_mu[iu];
    const double dlv = dz[iu] * 0.5 * std::exp(0.5 * z_log_var[iu]) * noise[iu] +
                       beta * 0.5 * (std::exp(z_log_var[iu]) - 1.0);
    enc_grad[iu + static_cast<std::size_t>(z_dim)] =
        dlv * bound_log_var_grad(z_log_var[iu]);
  }
  params.encoder.backward(enc_cache, enc_grad, encoder_grads);

  loss.total = loss.bce + beta * loss.kl;
  return loss;
}

VaeTrainResult vae_train(const std::vector<std::vector<double>>& dataset,
                         VaeParams& params, int epochs, Rng& rng) {
  if (dataset.empty()) throw std::invalid_argument("vae_train: empty dataset");
  for (const auto& frame : dataset)
    if (static_cast<int>(frame.size()) != params.config.input_dim)
      throw std::invalid_argument("vae_train: frame dimension mismatch");

  const std::size_t n = dataset.size();
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  for (std::size_t i = n - 1; i > 0; --i) {
    const std::size_t j =
        static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i)));
    std::swap(order[i], order[j]);
  }
  // 9:1 split, at least one sample on each side when possible.
  std::size_t val_count = n / 10;
  if (val_count == 0 && n > 1) val_count = 1;
  std::vector<std::size_t> train_idx(order.begin(),
                                     order.end() - static_cast<std::ptrdiff_t>(val_count));
  std::vector<std::size_t> val_idx(order.end() - static_cast<std::ptrdiff_t>(val_count),
                                   order.end());
  if (val_idx.empty()) val_idx = train_idx;

  const int z_dim = params.config.z_dim;
  const auto evaluate = [&](double& bce_out, double& kl_out) {
    double bce = 0.0, kl = 0.0;
    std::vector<double> z_mu, z_log_var;
    for (std::size_t idx : val_idx) {
      vae_encode(params, dataset[idx], z_mu, z_log_var);
      const std::vector<double> recon = vae_decode(params, z_mu);  // z = z_mu
      const VaeLoss loss =
          vae_loss(dataset[idx], recon, z_mu, z_log_var, params.config.kl_beta);
      bce += loss.bce;
      kl += loss.kl;
    }
    const double inv = 1.0 / static_cast<double>(val_idx.size());
    bce_out = bce * inv;
    kl_out = kl * inv;
  };

  VaeTrainResult result;
  evaluate(result.initial_val_bce, result.initial_val_kl);

  std::vector<double> enc_grads(params.encoder.param_count());
  std::vector<double> dec_grads(params.decoder.param_count());
  std::vector<double> noise(static_cast<std::size_t>(z_dim));
  const double lr = params.config.learning_rate;

  for (int epoch = 0; epoch < epochs; ++epoch) {
    for (std::size_t i = train_idx.size() - 1; i > 0; --i) {
      const std::size_t j =
          static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i)));
      std::swap(train_idx[i], train_idx[j]);
    }

    double epoch_bce = 0.0, epoch_kl = 0.0;
    const std::size_t batch =
        static_cast<std::size_t>(std::max(1, params.config.batch_size));
    for (std::size_t start = 0; start < train_idx.size(); start += batch) {
      const std::size_t stop = std::min(train_idx.size(), start + batch);
      std::fill(enc_grads.begin(), enc_grads.end(), 0.0);
      std::fill(dec_grads.begin(), dec_grads.end(), 0.0);
      for (std::size_t k = start; k < stop; ++k) {
        for (double& eps : noise) eps = rng.normal();
        const VaeLoss loss = vae_loss_and_grads(params, dataset[train_idx[k]],
                                                noise, enc_grads, dec_grads);
        epoch_bce += loss.bce;
        epoch_kl += loss.kl;
      }
      // Plain SGD on the batch-summed objective, clipped by global norm.
      double scale = 1.0;
      if (params.config.grad_clip_norm > 0.0) {
        double norm_sq = 0.0;
        for (double g : enc_grads) norm_sq += g * g;
        for (double g : dec_grads) norm_sq += g * g;
        const double norm = std::sqrt(norm_sq);
        if (norm > params.config.grad_clip_norm)
          scale = params.config.grad_clip_norm / norm;
      }
      auto& enc = params.encoder.params();
      for (std::size_t p = 0; p < enc.size(); ++p)
        enc[p] -= lr * scale * enc_grads[p];
      auto& dec = params.decoder.params();
      for (std::size_t p = 0; p < dec.size(); ++p)
        dec[p] -= lr * scale * dec_grads[p];
    }

    VaeEpochStats stats;
    stats.epoch = epoch;
    const double inv = 1.0 / static_cast<double>(train_idx.size());
    stats.train_bce = epoch_bce * inv;
    stats.train_kl = epoch_kl * inv;
    evaluate(stats.val_bce, stats.val_kl);
    result.history.push_back(stats);
  }
  return result;
}

}  // namespace curla
