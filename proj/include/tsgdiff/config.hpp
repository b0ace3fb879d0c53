#pragma once

#include <cstdint>
#include <string>

#include "tsgdiff/model.hpp"

namespace tsgdiff {

// Run-level configuration shared by the CLI commands. hidden_dim/latent_dim
// of 0 mean "take the profile's value" ("desk": 64/32, "paper": 1600/1600).
struct RunConfig {
  std::string dataset_path;
  std::size_t window_size = 48;
  std::size_t stride = 1;
  std::size_t hidden_dim = 0;
  std::size_t latent_dim = 0;
  std::size_t diffusion_steps = 1000;
  double beta_start = 1e-4;
  double beta_end = 0.02;
  double beta = 0.2;   // KL weight
  double gamma = 1.0;  // denoising weight
  double delta = 1.0;  // Fourier weight
  std::size_t epochs = 500;
  std::size_t batch_size = 128;
  double lr = 0.01;
  std::uint64_t seed = 42;
  bool no_kl = false;
  bool no_denoising = false;
  bool no_fourier = false;
  std::string profile = "desk";

  // Profile-resolved dimensions.
  std::size_t resolved_hidden() const;
  std::size_t resolved_latent() const;

  ModelConfig model_config(std::size_t features) const;
  void validate() const;
};

// Flat key=value file with '#' comments; unknown keys are rejected.
void apply_config_file(RunConfig& cfg, const std::string& path);

}  // namespace tsgdiff
