#pragma once

#include <string>
#include <vector>

#include "tsgdiff/model.hpp"
#include "tsgdiff/spectral.hpp"

namespace tsgdiff {

struct TrainOptions {
  std::size_t epochs = 500;
  std::size_t batch_size = 128;
  double lr = 0.01;
  double beta = 0.2;   // KL weight
  double gamma = 1.0;  // denoising weight
  double delta = 1.0;  // Fourier weight
  bool no_kl = false;
  bool no_denoising = false;
  bool no_fourier = false;
};

struct TrainLog {
  struct Epoch {
    std::size_t epoch;  // 1-based
    double recon, kl, denoising, fourier, total;
  };
  std::vector<Epoch> epochs;

  std::string to_csv() const;
};

// Joint VAE + latent-diffusion optimization over prebuilt window graphs.
// Each step encodes a shuffled minibatch, reparameterizes, corrupts the
// latents at one uniformly drawn step, predicts the clean latents, decodes
// the prediction and descends on the weighted loss. Ablated components are
// neither computed nor logged (they read exactly 0).
TrainLog train(ModelState& model, const WindowBatch& batch,
               const std::vector<TemporalGraph>& graphs, const TrainOptions& opt, Rng& rng);

}  // namespace tsgdiff
