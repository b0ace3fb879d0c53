#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "tsgdiff/data.hpp"
#include "tsgdiff/diffusion.hpp"
#include "tsgdiff/vae.hpp"

namespace tsgdiff {

// Architecture hyperparameters; everything a weights file needs to rebuild
// the module shapes.
struct ModelConfig {
  std::size_t window_size = 48;
  std::size_t features = 1;
  std::size_t hidden_dim = 64;
  std::size_t latent_dim = 32;
  std::size_t diffusion_steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  std::size_t time_embed_dim = 64;

  std::string canonical() const;
  std::uint64_t digest() const;
  bool operator==(const ModelConfig&) const = default;
};

// All learnable state of the pipeline plus the noise schedule and the data
// normalization it was trained with.
struct ModelState {
  ModelConfig cfg;
  EncoderState encoder;
  DecoderState decoder;
  DenoiserState denoiser;
  NoiseSchedule schedule;
  NormalizationParams norm;
  std::vector<std::string> feature_names;

  ModelState() = default;
  ModelState(const ModelConfig& c, Rng& rng);

  std::vector<Parameter*> parameters();

  // Walks every persisted tensor and counter in a fixed order. The visitor
  // receives stable names so the weights format is self-describing.
  struct Visitor {
    std::function<void(const std::string&, Tensor&)> tensor;
    std::function<void(const std::string&, std::int64_t&)> counter;
  };
  void visit_state(const Visitor& v);
};

}  // namespace tsgdiff
