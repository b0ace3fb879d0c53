#include "tsgdiff/diffusion.hpp"

#include <cmath>

namespace tsgdiff {

NoiseSchedule make_schedule(std::size_t steps, double beta_start, double beta_end) {
  require(steps >= 1, Errc::InvalidRange, "schedule needs at least one step");
  require(beta_start > 0.0 && beta_start <= beta_end && beta_end < 1.0, Errc::InvalidRange,
          "beta range must satisfy 0 < start <= end < 1");
  NoiseSchedule s;
  s.steps = steps;
  s.beta.resize(steps);
  s.alpha.resize(steps);
  s.alpha_bar.resize(steps);
  double prod = 1.0;
  for (std::size_t k = 0; k < steps; ++k) {
    s.beta[k] = steps == 1 ? beta_start
                           : beta_start + (beta_end - beta_start) * static_cast<double>(k) /
                                              static_cast<double>(steps - 1);
    s.alpha[k] = 1.0 - s.beta[k];
    prod *= s.alpha[k];
    s.alpha_bar[k] = prod;
  }
  return s;
}

DenoiserState::DenoiserState(std::size_t latent, std::size_t t_dim, Rng& rng)
    : time_embed_dim(t_dim) {
  auto init = [&rng](std::size_t f_in, std::size_t f_out) {
    Tensor w({f_in, f_out});
    const double s = 1.0 / std::sqrt(static_cast<double>(f_in));
    for (double& v : w.data) v = s * rng.normal();
    return Parameter(std::move(w));
  };
  in_w = init(latent + t_dim, hidden);
  in_b = Parameter(Tensor::zeros({hidden}));
  for (int i = 0; i < 3; ++i) blocks.push_back({init(hidden, hidden), Parameter(Tensor::zeros({hidden}))});
  out_w = init(hidden, latent);
  out_b = Parameter(Tensor::zeros({latent}));
}

Tensor time_embedding(std::size_t k, std::size_t dim) {
  require(dim >= 2 && dim % 2 == 0, Errc::InvalidRange, "time embedding dim must be even");
  const std::size_t half = dim / 2;
  Tensor out({1, dim});
  for (std::size_t i = 0; i < half; ++i) {
    const double rate =
        half == 1 ? 1.0
                  : std::exp(-std::log(1e4) * static_cast<double>(i) / static_cast<double>(half - 1));
    const double ang = static_cast<double>(k) * rate;
    out[2 * i] = std::sin(ang);
    out[2 * i + 1] = std::cos(ang);
  }
  return out;
}

Tensor forward_noise(const Tensor& z, std::size_t k, const Tensor& epsilon,
                     const NoiseSchedule& schedule) {
  require(k < schedule.steps, Errc::StepOutOfRange, "forward_noise step");
  require(z.same_shape(epsilon), Errc::ShapeMismatch, "forward_noise noise shape");
  const double a = std::sqrt(schedule.alpha_bar[k]);
  const double b = std::sqrt(1.0 - schedule.alpha_bar[k]);
  Tensor out = z;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] = a * z[i] + b * epsilon[i];
  return out;
}

Tape::Id forward_noise(Tape& tape, Tape::Id z, std::size_t k, const Tensor& epsilon,
                       const NoiseSchedule& schedule) {
  require(k < schedule.steps, Errc::StepOutOfRange, "forward_noise step");
  const double a = std::sqrt(schedule.alpha_bar[k]);
  const double b = std::sqrt(1.0 - schedule.alpha_bar[k]);
  Tensor noise = epsilon;
  for (double& v : noise.data) v *= b;
  return tape.add(tape.scale(z, a), tape.input(noise));
}

Tape::Id denoise_predict(Tape& tape, DenoiserState& den, Tape::Id z_k_rows, std::size_t k) {
  const std::size_t n = tape.value(z_k_rows).rows();
  const Tensor emb_row = time_embedding(k, den.time_embed_dim);
  Tensor emb({n, den.time_embed_dim});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < den.time_embed_dim; ++j) emb.at(i, j) = emb_row[j];

  Tape::Id h = tape.concat_cols(z_k_rows, tape.input(std::move(emb)));
  h = tape.add_bias(tape.matmul(h, tape.param(den.in_w)), tape.param(den.in_b));
  for (DenoiserState::Block& b : den.blocks)
    h = tape.relu(tape.add_bias(tape.matmul(h, tape.param(b.weight)), tape.param(b.bias)));
  return tape.add_bias(tape.matmul(h, tape.param(den.out_w)), tape.param(den.out_b));
}

Tensor denoise_predict_eval(DenoiserState& den, const Tensor& z_k_rows, std::size_t k) {
  Tape tape;
  return tape.value(denoise_predict(tape, den, tape.input(z_k_rows), k));
}

Tensor reverse_step(const Tensor& z_k_rows, const Tensor& z_hat_rows, std::size_t k,
                    const NoiseSchedule& schedule, Rng* rng, bool deterministic) {
  require(k < schedule.steps, Errc::StepOutOfRange, "reverse_step step");
  require(z_k_rows.same_shape(z_hat_rows), Errc::ShapeMismatch, "reverse_step shapes");
  const double abar = schedule.alpha_bar[k];
  const double abar_prev = schedule.alpha_bar_prev(k);
  const double alpha = schedule.alpha[k];
  const double beta = schedule.beta[k];
  // Posterior mean coefficients in the clean-latent parameterization; at
  // k = 0 they reduce to (1, 0) so the chain ends on zhat exactly.
  const double c_hat = std::sqrt(abar_prev) * beta / (1.0 - abar);
  const double c_cur = std::sqrt(alpha) * (1.0 - abar_prev) / (1.0 - abar);
  const double sigma = std::sqrt(schedule.sigma2(k));

  Tensor out = z_k_rows;
  const bool add_noise = !deterministic && k > 0;
  for (std::size_t i = 0; i < out.numel(); ++i) {
    out[i] = c_hat * z_hat_rows[i] + c_cur * z_k_rows[i];
    if (add_noise) out[i] += sigma * rng->normal();
  }
  return out;
}

Tensor sample_latents(DenoiserState& den, const NoiseSchedule& schedule, std::size_t n,
                      std::size_t latent, Rng& rng, bool deterministic) {
  Tensor z({n, latent});
  if (n == 0) return z;
  for (double& v : z.data) v = rng.normal();
  for (std::size_t step = schedule.steps; step-- > 0;) {
    Tensor z_hat = denoise_predict_eval(den, z, step);
    z = reverse_step(z, z_hat, step, schedule, &rng, deterministic);
  }
  return z;
}

double denoising_loss(const Tensor& z_hat, const Tensor& z) {
  require(z_hat.same_shape(z), Errc::ShapeMismatch, "denoising_loss shapes");
  double s = 0.0;
  for (std::size_t i = 0; i < z.numel(); ++i) {
    const double d = z_hat[i] - z[i];
    s += d * d;
  }
  return s / static_cast<double>(z.numel());
}

double fourier_loss(const Tensor& x_hat, const Tensor& x) {
  require(x_hat.same_shape(x) && x.ndim() == 2, Errc::ShapeMismatch, "fourier_loss shapes");
  Tape tape;
  Tensor a_row({1, x.numel()});
  a_row.data = x_hat.data;
  Tensor b_row({1, x.numel()});
  b_row.data = x.data;
  return tape.value(
      tape.spectral_mse(tape.input(std::move(a_row)), tape.input(std::move(b_row)), x.rows(),
                        x.cols()))[0];
}

double total_loss(double recon, double kl, double denoising, double fourier, double beta,
                  double gamma, double delta) {
  const double total = recon + beta * kl + gamma * denoising + delta * fourier;
  require(std::isfinite(total), Errc::NonFiniteLoss, "total loss is not finite");
  return total;
}

void collect_parameters(DenoiserState& d, std::vector<Parameter*>& out) {
  out.push_back(&d.in_w);
  out.push_back(&d.in_b);
  for (DenoiserState::Block& b : d.blocks) {
    out.push_back(&b.weight);
    out.push_back(&b.bias);
  }
  out.push_back(&d.out_w);
  out.push_back(&d.out_b);
}

}  // namespace tsgdiff
