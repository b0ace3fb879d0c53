#include "tsgdiff/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace tsgdiff {

std::string TrainLog::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,recon,kl,denoising,fourier,total\n";
  for (const Epoch& e : epochs)
    out << e.epoch << ',' << e.recon << ',' << e.kl << ',' << e.denoising << ',' << e.fourier
        << ',' << e.total << '\n';
  return out.str();
}

TrainLog train(ModelState& model, const WindowBatch& batch,
               const std::vector<TemporalGraph>& graphs, const TrainOptions& opt, Rng& rng) {
  const std::size_t m = batch.count();
  require(graphs.size() == m, Errc::DimensionMismatch, "one graph per window required");
  require(m >= 1, Errc::InsufficientData, "no windows to train on");

  const std::size_t w = batch.window_size();
  const std::size_t d = batch.features();
  const std::size_t e = model.cfg.latent_dim;
  require(w == model.cfg.window_size && d == model.cfg.features, Errc::DimensionMismatch,
          "window shape does not match the model config");

  const double beta = opt.no_kl ? 0.0 : opt.beta;
  const double gamma = opt.no_denoising ? 0.0 : opt.gamma;
  const double delta = opt.no_fourier ? 0.0 : opt.delta;

  std::vector<Parameter*> params = model.parameters();
  AdamConfig adam;
  adam.lr = opt.lr;

  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), 0);

  TrainLog log;
  for (std::size_t epoch = 1; epoch <= opt.epochs; ++epoch) {
    // Fisher-Yates with the run rng keeps the whole schedule seed-determined.
    for (std::size_t i = m; i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);

    double sum_recon = 0.0, sum_kl = 0.0, sum_diff = 0.0, sum_four = 0.0, sum_total = 0.0;
    std::size_t steps = 0;

    for (std::size_t start = 0; start < m; start += opt.batch_size) {
      const std::size_t count = std::min(opt.batch_size, m - start);
      if (count < 2 && m >= 2) continue;  // batch-norm needs two rows

      try {
        Tape tape;
        std::vector<Tape::Id> mu_rows, ls_rows;
        Tensor targets({count, w * d});
        for (std::size_t i = 0; i < count; ++i) {
          const std::size_t idx = order[start + i];
          Tape::Id a = tape.input(graphs[idx].adjacency);
          Tape::Id x = tape.input(batch.window(idx));
          auto [mu, ls] = encode(tape, model.encoder, a, x, true);
          mu_rows.push_back(mu);
          ls_rows.push_back(ls);
          const double* src = batch.windows.data.data() + idx * w * d;
          std::copy(src, src + w * d, targets.data.begin() + i * w * d);
        }
        Tape::Id mu = tape.vstack(mu_rows);
        Tape::Id ls = tape.vstack(ls_rows);

        Tensor eps({count, e});
        for (double& v : eps.data) v = rng.normal();
        Tape::Id z = reparameterize(tape, mu, ls, eps);

        const std::size_t k = rng.below(model.schedule.steps);
        Tensor eps_k({count, e});
        for (double& v : eps_k.data) v = rng.normal();
        Tape::Id z_k = forward_noise(tape, z, k, eps_k, model.schedule);
        Tape::Id z_hat = denoise_predict(tape, model.denoiser, z_k, k);
        Tape::Id x_hat = decode(tape, model.decoder, z_hat, true);
        Tape::Id x_ref = tape.input(std::move(targets));

        std::vector<std::pair<Tape::Id, double>> terms;
        Tape::Id recon = tape.mse(x_hat, x_ref);
        terms.emplace_back(recon, 1.0);
        double kl_val = 0.0, diff_val = 0.0, four_val = 0.0;
        if (!opt.no_kl) {
          Tape::Id kl = tape.kl_divergence(mu, ls);
          terms.emplace_back(kl, beta);
          kl_val = tape.value(kl)[0];
        }
        if (!opt.no_denoising) {
          Tape::Id diff = tape.mse(z_hat, z);
          terms.emplace_back(diff, gamma);
          diff_val = tape.value(diff)[0];
        }
        if (!opt.no_fourier) {
          Tape::Id four = tape.spectral_mse(x_hat, x_ref, w, d);
          terms.emplace_back(four, delta);
          four_val = tape.value(four)[0];
        }
        Tape::Id total = tape.weighted_sum(terms);
        const double total_val = tape.value(total)[0];
        require(std::isfinite(total_val), Errc::NonFiniteLoss, "total loss is not finite");

        tape.backward(total);
        adam_step(params, adam);

        sum_recon += tape.value(recon)[0];
        sum_kl += kl_val;
        sum_diff += diff_val;
        sum_four += four_val;
        sum_total += total_val;
        ++steps;
      } catch (const Error& err) {
        if (err.code() != Errc::NonFiniteLoss) throw;
        fail(Errc::NonFiniteLoss, "epoch " + std::to_string(epoch) + ", step " +
                                      std::to_string(steps + 1) + ": " + err.what());
      }
    }

    const double n = steps > 0 ? static_cast<double>(steps) : 1.0;
    log.epochs.push_back({epoch, sum_recon / n, sum_kl / n, sum_diff / n, sum_four / n,
                          sum_total / n});
  }
  return log;
}

}  // namespace tsgdiff
