#include "tsgdiff/model.hpp"

#include <sstream>

namespace tsgdiff {

std::string ModelConfig::canonical() const {
  std::ostringstream out;
  out.precision(17);
  out << "w=" << window_size << ";d=" << features << ";hidden=" << hidden_dim
      << ";latent=" << latent_dim << ";K=" << diffusion_steps << ";beta_start=" << beta_start
      << ";beta_end=" << beta_end << ";temb=" << time_embed_dim;
  return out.str();
}

std::uint64_t ModelConfig::digest() const {
  // FNV-1a over the canonical config string.
  std::uint64_t h = 1469598103934665603ULL;
  for (char c : canonical()) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

ModelState::ModelState(const ModelConfig& c, Rng& rng)
    : cfg(c),
      encoder(c.features, c.hidden_dim, c.latent_dim, rng),
      decoder(c.latent_dim, c.window_size, c.features, rng),
      denoiser(c.latent_dim, c.time_embed_dim, rng),
      schedule(make_schedule(c.diffusion_steps, c.beta_start, c.beta_end)) {
  norm.per_feature_min.assign(c.features, 0.0);
  norm.per_feature_max.assign(c.features, 0.0);
  feature_names.assign(c.features, "");
}

std::vector<Parameter*> ModelState::parameters() {
  std::vector<Parameter*> out;
  collect_parameters(encoder, out);
  collect_parameters(decoder, out);
  collect_parameters(denoiser, out);
  return out;
}

namespace {

void visit_parameter(const ModelState::Visitor& v, const std::string& name, Parameter& p) {
  v.tensor(name + ".value", p.value);
  v.tensor(name + ".adam_m", p.adam_m);
  v.tensor(name + ".adam_v", p.adam_v);
  v.counter(name + ".steps", p.step_count);
}

void visit_bn(const ModelState::Visitor& v, const std::string& name, BatchNormState& bn) {
  visit_parameter(v, name + ".scale", bn.scale);
  visit_parameter(v, name + ".shift", bn.shift);
  v.tensor(name + ".running_mean", bn.running_mean);
  v.tensor(name + ".running_var", bn.running_var);
}

}  // namespace

void ModelState::visit_state(const Visitor& v) {
  for (std::size_t i = 0; i < encoder.blocks.size(); ++i) {
    const std::string p = "encoder.block" + std::to_string(i);
    GraphConvBlock& b = encoder.blocks[i];
    visit_parameter(v, p + ".weight", b.weight);
    visit_parameter(v, p + ".bias", b.bias);
    visit_bn(v, p + ".bn", b.bn);
    if (b.projection) visit_parameter(v, p + ".projection", *b.projection);
  }
  visit_parameter(v, "encoder.head_mu.weight", encoder.head_mu_w);
  visit_parameter(v, "encoder.head_mu.bias", encoder.head_mu_b);
  visit_parameter(v, "encoder.head_ls.weight", encoder.head_ls_w);
  visit_parameter(v, "encoder.head_ls.bias", encoder.head_ls_b);

  for (std::size_t i = 0; i < decoder.stages.size(); ++i) {
    const std::string p = "decoder.stage" + std::to_string(i);
    DecoderState::Stage& s = decoder.stages[i];
    visit_parameter(v, p + ".weight", s.weight);
    visit_parameter(v, p + ".bias", s.bias);
    if (s.has_bn) visit_bn(v, p + ".bn", s.bn);
  }

  visit_parameter(v, "denoiser.in.weight", denoiser.in_w);
  visit_parameter(v, "denoiser.in.bias", denoiser.in_b);
  for (std::size_t i = 0; i < denoiser.blocks.size(); ++i) {
    const std::string p = "denoiser.block" + std::to_string(i);
    visit_parameter(v, p + ".weight", denoiser.blocks[i].weight);
    visit_parameter(v, p + ".bias", denoiser.blocks[i].bias);
  }
  visit_parameter(v, "denoiser.out.weight", denoiser.out_w);
  visit_parameter(v, "denoiser.out.bias", denoiser.out_b);

  Tensor beta_t = Tensor::vec(schedule.beta);
  v.tensor("schedule.beta", beta_t);
  if (beta_t.data != schedule.beta) {
    // A load replaced the betas; rebuild the derived vectors.
    schedule.beta = beta_t.data;
    schedule.alpha.resize(schedule.beta.size());
    schedule.alpha_bar.resize(schedule.beta.size());
    double prod = 1.0;
    for (std::size_t k = 0; k < schedule.beta.size(); ++k) {
      schedule.alpha[k] = 1.0 - schedule.beta[k];
      prod *= schedule.alpha[k];
      schedule.alpha_bar[k] = prod;
    }
    schedule.steps = schedule.beta.size();
  }

  Tensor mins = Tensor::vec(norm.per_feature_min);
  Tensor maxs = Tensor::vec(norm.per_feature_max);
  v.tensor("norm.min", mins);
  v.tensor("norm.max", maxs);
  norm.per_feature_min = mins.data;
  norm.per_feature_max = maxs.data;
}

}  // namespace tsgdiff
