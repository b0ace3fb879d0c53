#include "tsgdiff/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <json.hpp>

#include "tsgdiff/tape.hpp"

namespace tsgdiff {

namespace {

constexpr double kEntropyEps = 1e-10;

void check_windows(const Tensor& t, const char* who) {
  require(t.ndim() == 3, Errc::ShapeMismatch, std::string(who) + " expects M x w x D windows");
}

// Flattens M x w x D windows into M rows of w*D values.
Tensor flatten_windows(const Tensor& t) {
  Tensor out({t.shape[0], t.shape[1] * t.shape[2]});
  out.data = t.data;
  return out;
}

struct Mlp {
  Parameter w1, b1, w2, b2;

  Mlp(std::size_t in, std::size_t hidden, std::size_t out, Rng& rng) {
    auto init = [&rng](std::size_t r, std::size_t c) {
      Tensor t({r, c});
      const double s = 1.0 / std::sqrt(static_cast<double>(r));
      for (double& v : t.data) v = s * rng.normal();
      return Parameter(std::move(t));
    };
    w1 = init(in, hidden);
    b1 = Parameter(Tensor::zeros({hidden}));
    w2 = init(hidden, out);
    b2 = Parameter(Tensor::zeros({out}));
  }

  Tape::Id forward(Tape& tape, Tape::Id x, bool tanh_head) {
    Tape::Id h = tape.mish(tape.add_bias(tape.matmul(x, tape.param(w1)), tape.param(b1)));
    Tape::Id y = tape.add_bias(tape.matmul(h, tape.param(w2)), tape.param(b2));
    return tanh_head ? tape.tanh(y) : y;
  }

  void fit(const Tensor& x, const Tensor& y, bool tanh_head, std::size_t steps, Rng&) {
    std::vector<Parameter*> params{&w1, &b1, &w2, &b2};
    AdamConfig adam;
    for (std::size_t s = 0; s < steps; ++s) {
      Tape tape;
      Tape::Id out = forward(tape, tape.input(x), tanh_head);
      Tape::Id loss = tape.mse(out, tape.input(y));
      tape.backward(loss);
      adam_step(params, adam);
    }
  }

  Tensor predict(const Tensor& x, bool tanh_head) {
    Tape tape;
    return tape.value(forward(tape, tape.input(x), tanh_head));
  }
};

}  // namespace

std::string MetricReport::to_json() const {
  nlohmann::json j;
  j["topo_fid"] = topo_fid;
  j["s_edit_mean"] = s_edit_mean;
  j["s_entropy_mean"] = s_entropy_mean;
  j["correlational"] = correlational;
  j["discriminative"] = discriminative;
  j["predictive"] = predictive;
  j["pair_count"] = pair_count;
  j["seed"] = seed;
  return j.dump(2);
}

DegreeDistribution degree_distribution(const Tensor& adjacency) {
  const std::size_t n = adjacency.rows();
  std::map<std::size_t, std::size_t> hist;
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t deg = 0;
    for (std::size_t j = 0; j < n; ++j) deg += adjacency.at(i, j) != 0.0 ? 1 : 0;
    ++hist[deg];
  }
  DegreeDistribution out;
  out.total_nodes = n;
  out.counts.assign(hist.begin(), hist.end());
  return out;
}

double graph_edit_similarity(const Tensor& a, const Tensor& a_hat) {
  require(a.ndim() == 2 && a.rows() == a.cols(), Errc::DimensionMismatch, "adjacency must be square");
  require(a.same_shape(a_hat), Errc::DimensionMismatch, "graph sizes differ");
  const std::size_t n = a.rows();
  double diff = 0.0;
  for (std::size_t i = 0; i < a.numel(); ++i) diff += std::abs(a[i] - a_hat[i]);
  return 1.0 - diff / static_cast<double>(n * n);
}

double structural_entropy(const Tensor& adjacency) {
  const DegreeDistribution dist = degree_distribution(adjacency);
  double h = 0.0;
  for (const auto& [deg, count] : dist.counts) {
    const double p = static_cast<double>(count) / static_cast<double>(dist.total_nodes);
    h -= p * std::log2(p + kEntropyEps);
  }
  return h;
}

double entropy_similarity(const Tensor& a, const Tensor& a_hat) {
  return 1.0 / (1.0 + std::abs(structural_entropy(a) - structural_entropy(a_hat)));
}

TopoFidResult topo_fid(const std::vector<TemporalGraph>& real_graphs,
                       const std::vector<TemporalGraph>& synth_graphs, double alpha,
                       std::size_t pairs, Rng& rng, bool identity_pairing) {
  require(!real_graphs.empty() && !synth_graphs.empty(), Errc::EmptySampleSet,
          "topo_fid needs graphs on both sides");
  const std::size_t w = real_graphs.front().nodes();
  for (const TemporalGraph& g : real_graphs)
    require(g.nodes() == w, Errc::DimensionMismatch, "real graphs must share node count");
  for (const TemporalGraph& g : synth_graphs)
    require(g.nodes() == w, Errc::DimensionMismatch, "synthetic graphs must share node count");

  // Entropies depend only on each graph, so compute them once per side.
  std::vector<double> h_real(real_graphs.size()), h_synth(synth_graphs.size());
  for (std::size_t i = 0; i < real_graphs.size(); ++i)
    h_real[i] = structural_entropy(real_graphs[i].adjacency);
  for (std::size_t i = 0; i < synth_graphs.size(); ++i)
    h_synth[i] = structural_entropy(synth_graphs[i].adjacency);

  std::size_t n_pairs = pairs;
  if (identity_pairing) {
    require(real_graphs.size() == synth_graphs.size(), Errc::DimensionMismatch,
            "identity pairing needs equal list lengths");
    n_pairs = real_graphs.size();
  }
  require(n_pairs >= 1, Errc::EmptySampleSet, "no pairs requested");

  double sum_edit = 0.0, sum_entropy = 0.0;
  for (std::size_t p = 0; p < n_pairs; ++p) {
    const std::size_t i = identity_pairing ? p : rng.below(real_graphs.size());
    const std::size_t j = identity_pairing ? p : rng.below(synth_graphs.size());
    sum_edit += graph_edit_similarity(real_graphs[i].adjacency, synth_graphs[j].adjacency);
    sum_entropy += 1.0 / (1.0 + std::abs(h_real[i] - h_synth[j]));
  }

  TopoFidResult out;
  out.pair_count = n_pairs;
  out.s_edit_mean = sum_edit / static_cast<double>(n_pairs);
  out.s_entropy_mean = sum_entropy / static_cast<double>(n_pairs);
  out.topo_fid = alpha * out.s_edit_mean + (1.0 - alpha) * out.s_entropy_mean;
  return out;
}

namespace {

// Pearson correlation matrix over the rows of an N x D matrix. Zero-variance
// columns get zero correlation everywhere (diagonal included) and bump the
// warning counter.
Tensor correlation_matrix(const Tensor& rows, std::size_t* warnings) {
  const std::size_t n = rows.rows(), d = rows.cols();
  std::vector<double> mean(d, 0.0), sd(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < n; ++i) mean[j] += rows.at(i, j);
    mean[j] /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double dev = rows.at(i, j) - mean[j];
      sd[j] += dev * dev;
    }
    sd[j] = std::sqrt(sd[j] / static_cast<double>(n));
    if (sd[j] == 0.0 && warnings) ++*warnings;
  }
  Tensor rho({d, d});
  for (std::size_t a = 0; a < d; ++a)
    for (std::size_t b = 0; b < d; ++b) {
      if (sd[a] == 0.0 || sd[b] == 0.0) continue;  // stays 0
      double cov = 0.0;
      for (std::size_t i = 0; i < n; ++i) cov += (rows.at(i, a) - mean[a]) * (rows.at(i, b) - mean[b]);
      cov /= static_cast<double>(n);
      rho.at(a, b) = cov / (sd[a] * sd[b]);
    }
  return rho;
}

Tensor stack_time_rows(const Tensor& windows) {
  const std::size_t m = windows.shape[0], w = windows.shape[1], d = windows.shape[2];
  Tensor out({m * w, d});
  out.data = windows.data;
  return out;
}

}  // namespace

double correlational_score(const Tensor& real_windows, const Tensor& synth_windows,
                           std::size_t* warnings) {
  check_windows(real_windows, "correlational_score(real)");
  check_windows(synth_windows, "correlational_score(synth)");
  const std::size_t d = real_windows.shape[2];
  require(synth_windows.shape[2] == d, Errc::DimensionMismatch, "feature counts differ");
  if (d < 2) return 0.0;

  const Tensor rho_real = correlation_matrix(stack_time_rows(real_windows), warnings);
  const Tensor rho_synth = correlation_matrix(stack_time_rows(synth_windows), warnings);
  double sum = 0.0;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j)
      if (i != j) sum += std::abs(rho_real.at(i, j) - rho_synth.at(i, j));
  return sum / static_cast<double>(d * (d - 1));
}

double discriminative_score(const Tensor& real_windows, const Tensor& synth_windows, Rng& rng) {
  check_windows(real_windows, "discriminative_score(real)");
  check_windows(synth_windows, "discriminative_score(synth)");
  const std::size_t m_real = real_windows.shape[0], m_synth = synth_windows.shape[0];
  require(m_real >= 20 && m_synth >= 20, Errc::InsufficientData,
          "discriminative_score needs >= 20 windows per side");
  require(real_windows.shape[1] == synth_windows.shape[1] &&
              real_windows.shape[2] == synth_windows.shape[2],
          Errc::DimensionMismatch, "window shapes differ");

  const Tensor real_rows = flatten_windows(real_windows);
  const Tensor synth_rows = flatten_windows(synth_windows);
  const std::size_t f = real_rows.cols();

  // Stratified shuffled 80/20 split: real labelled +1, synthetic -1.
  auto split = [&rng](std::size_t m) {
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = m; i > 1; --i) std::swap(idx[i - 1], idx[rng.below(i)]);
    const std::size_t train = m - m / 5;
    return std::pair{std::vector<std::size_t>(idx.begin(), idx.begin() + train),
                     std::vector<std::size_t>(idx.begin() + train, idx.end())};
  };
  auto [train_real, test_real] = split(m_real);
  auto [train_synth, test_synth] = split(m_synth);

  const std::size_t n_train = train_real.size() + train_synth.size();
  Tensor x_train({n_train, f});
  Tensor y_train({n_train, 1});
  std::size_t r = 0;
  auto emit = [&](const Tensor& rows, const std::vector<std::size_t>& idx, double label) {
    for (std::size_t i : idx) {
      std::copy(rows.data.begin() + i * f, rows.data.begin() + (i + 1) * f,
                x_train.data.begin() + r * f);
      y_train[r] = label;
      ++r;
    }
  };
  emit(real_rows, train_real, 1.0);
  emit(synth_rows, train_synth, -1.0);

  Mlp net(f, 32, 1, rng);
  net.fit(x_train, y_train, /*tanh_head=*/true, 200, rng);

  std::size_t correct = 0, total = 0;
  auto score_side = [&](const Tensor& rows, const std::vector<std::size_t>& idx, double label) {
    if (idx.empty()) return;
    Tensor x({idx.size(), f});
    for (std::size_t i = 0; i < idx.size(); ++i)
      std::copy(rows.data.begin() + idx[i] * f, rows.data.begin() + (idx[i] + 1) * f,
                x.data.begin() + i * f);
    Tensor pred = net.predict(x, true);
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const double sign = pred[i] >= 0.0 ? 1.0 : -1.0;
      correct += sign == label ? 1 : 0;
      ++total;
    }
  };
  score_side(real_rows, test_real, 1.0);
  score_side(synth_rows, test_synth, -1.0);

  const double acc = static_cast<double>(correct) / static_cast<double>(total);
  return std::abs(acc - 0.5);
}

double predictive_score(const Tensor& real_windows, const Tensor& synth_windows, Rng& rng) {
  check_windows(real_windows, "predictive_score(real)");
  check_windows(synth_windows, "predictive_score(synth)");
  const std::size_t m_real = real_windows.shape[0], m_synth = synth_windows.shape[0];
  require(m_real >= 20 && m_synth >= 20, Errc::InsufficientData,
          "predictive_score needs >= 20 windows per side");
  const std::size_t w = real_windows.shape[1], d = real_windows.shape[2];
  require(w >= 2, Errc::InsufficientData, "predictive_score needs windows of length >= 2");
  require(synth_windows.shape[1] == w && synth_windows.shape[2] == d, Errc::DimensionMismatch,
          "window shapes differ");

  const std::size_t f_in = (w - 1) * d;
  auto make_xy = [&](const Tensor& windows) {
    const std::size_t m = windows.shape[0];
    Tensor x({m, f_in});
    Tensor y({m, d});
    for (std::size_t i = 0; i < m; ++i) {
      const double* win = windows.data.data() + i * w * d;
      std::copy(win, win + f_in, x.data.begin() + i * f_in);
      std::copy(win + f_in, win + w * d, y.data.begin() + i * d);
    }
    return std::pair{std::move(x), std::move(y)};
  };

  auto [x_synth, y_synth] = make_xy(synth_windows);
  auto [x_real, y_real] = make_xy(real_windows);

  Mlp net(f_in, 32, d, rng);
  net.fit(x_synth, y_synth, /*tanh_head=*/false, 200, rng);

  Tensor pred = net.predict(x_real, false);
  double mae = 0.0;
  for (std::size_t i = 0; i < pred.numel(); ++i) mae += std::abs(pred[i] - y_real[i]);
  return mae / static_cast<double>(pred.numel());
}

}  // namespace tsgdiff
