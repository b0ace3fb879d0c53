#pragma once

#include <cstddef>
#include <vector>

#include "tsgdiff/rng.hpp"
#include "tsgdiff/tape.hpp"

namespace tsgdiff {

struct NoiseSchedule {
  std::size_t steps = 0;  // K
  std::vector<double> beta;
  std::vector<double> alpha;      // 1 - beta
  std::vector<double> alpha_bar;  // cumulative product of alpha

  // alpha_bar of the previous step, 1 when k = 0.
  double alpha_bar_prev(std::size_t k) const { return k == 0 ? 1.0 : alpha_bar[k - 1]; }
  // Reverse-process variance beta_k (1 - abar_{k-1}) / (1 - abar_k).
  double sigma2(std::size_t k) const {
    return beta[k] * (1.0 - alpha_bar_prev(k)) / (1.0 - alpha_bar[k]);
  }
};

// Linear beta schedule, endpoints inclusive.
NoiseSchedule make_schedule(std::size_t steps, double beta_start, double beta_end);

// Time-embedded MLP predicting the clean latent from a noisy one: an input
// projection, three ReLU blocks of 64 units, and an output projection.
struct DenoiserState {
  Parameter in_w, in_b;
  struct Block {
    Parameter weight, bias;
  };
  std::vector<Block> blocks;
  Parameter out_w, out_b;
  std::size_t time_embed_dim = 64;
  std::size_t hidden = 64;

  DenoiserState() = default;
  DenoiserState(std::size_t latent, std::size_t time_embed_dim, Rng& rng);
};

// Sinusoidal embedding of step index k; angular rates geometrically spaced
// so that distinct steps map to distinct vectors.
Tensor time_embedding(std::size_t k, std::size_t dim);

// z_k = sqrt(abar_k) z + sqrt(1 - abar_k) eps.
Tensor forward_noise(const Tensor& z, std::size_t k, const Tensor& epsilon,
                     const NoiseSchedule& schedule);
Tape::Id forward_noise(Tape& tape, Tape::Id z, std::size_t k, const Tensor& epsilon,
                       const NoiseSchedule& schedule);

Tape::Id denoise_predict(Tape& tape, DenoiserState& den, Tape::Id z_k_rows, std::size_t k);
Tensor denoise_predict_eval(DenoiserState& den, const Tensor& z_k_rows, std::size_t k);

// One reverse-chain update: the posterior mean of z_{k-1} given (z_k, zhat)
// plus sigma_k eps'. The deterministic flag zeroes the noise; the final step
// (k = 0) is always noise-free and returns zhat exactly.
Tensor reverse_step(const Tensor& z_k_rows, const Tensor& z_hat_rows, std::size_t k,
                    const NoiseSchedule& schedule, Rng* rng, bool deterministic);

// Runs the reverse chain from standard-normal latents; returns n x E rows.
Tensor sample_latents(DenoiserState& den, const NoiseSchedule& schedule, std::size_t n,
                      std::size_t latent, Rng& rng, bool deterministic);

double denoising_loss(const Tensor& z_hat, const Tensor& z);
double fourier_loss(const Tensor& x_hat, const Tensor& x);
double total_loss(double recon, double kl, double denoising, double fourier, double beta,
                  double gamma, double delta);

void collect_parameters(DenoiserState& d, std::vector<Parameter*>& out);

}  // namespace tsgdiff
