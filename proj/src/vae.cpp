#include "tsgdiff/vae.hpp"

#include <cmath>

namespace tsgdiff {

namespace {

Tensor gaussian_matrix(std::size_t r, std::size_t c, double stddev, Rng& rng) {
  Tensor t({r, c});
  for (double& v : t.data) v = stddev * rng.normal();
  return t;
}

Parameter linear_weight(std::size_t f_in, std::size_t f_out, Rng& rng) {
  return Parameter(gaussian_matrix(f_in, f_out, 1.0 / std::sqrt(static_cast<double>(f_in)), rng));
}

}  // namespace

GraphConvBlock::GraphConvBlock(std::size_t f_in, std::size_t f_out, Rng& rng)
    : weight(linear_weight(f_in, f_out, rng)),
      bias(Parameter(Tensor::zeros({f_out}))),
      bn(BatchNormState(f_out)) {
  if (f_in != f_out) projection = linear_weight(f_in, f_out, rng);
}

EncoderState::EncoderState(std::size_t d, std::size_t hidden, std::size_t latent, Rng& rng)
    : latent_dim(latent) {
  blocks.emplace_back(d, hidden, rng);
  blocks.emplace_back(hidden, hidden, rng);
  blocks.emplace_back(hidden, hidden, rng);
  head_mu_w = linear_weight(hidden, latent, rng);
  head_mu_b = Parameter(Tensor::zeros({latent}));
  head_ls_w = linear_weight(hidden, latent, rng);
  head_ls_b = Parameter(Tensor::zeros({latent}));
}

DecoderState::DecoderState(std::size_t latent, std::size_t w, std::size_t d, Rng& rng)
    : out_rows(w), out_cols(d) {
  const std::size_t widths[5] = {latent, 2 * latent, 4 * latent, 4 * latent, w * d};
  for (std::size_t i = 0; i < 4; ++i) {
    Stage s;
    s.weight = linear_weight(widths[i], widths[i + 1], rng);
    s.bias = Parameter(Tensor::zeros({widths[i + 1]}));
    s.has_bn = i < 3;
    if (s.has_bn) s.bn = BatchNormState(widths[i + 1]);
    stages.push_back(std::move(s));
  }
}

Tape::Id graph_conv_forward(Tape& tape, GraphConvBlock& block, Tape::Id adjacency, Tape::Id x,
                            bool training) {
  Tape::Id agg = tape.matmul(adjacency, x);
  Tape::Id lin = tape.add_bias(tape.matmul(agg, tape.param(block.weight)), tape.param(block.bias));
  Tape::Id act = tape.mish(tape.batch_norm(lin, block.bn, training));
  Tape::Id residual =
      block.projection ? tape.matmul(x, tape.param(*block.projection)) : x;
  return tape.add(act, residual);
}

std::pair<Tape::Id, Tape::Id> encode(Tape& tape, EncoderState& enc, Tape::Id adjacency,
                                     Tape::Id node_features, bool training) {
  Tape::Id h = node_features;
  for (GraphConvBlock& block : enc.blocks) h = graph_conv_forward(tape, block, adjacency, h, training);
  Tape::Id pooled = tape.mean_pool_rows(h);
  Tape::Id mu = tape.add_bias(tape.matmul(pooled, tape.param(enc.head_mu_w)), tape.param(enc.head_mu_b));
  Tape::Id ls = tape.add_bias(tape.matmul(pooled, tape.param(enc.head_ls_w)), tape.param(enc.head_ls_b));
  return {mu, ls};
}

std::pair<Tensor, Tensor> encode_eval(EncoderState& enc, const TemporalGraph& graph, bool training) {
  Tape tape;
  Tape::Id a = tape.input(graph.adjacency);
  Tape::Id x = tape.input(graph.node_features);
  auto [mu, ls] = encode(tape, enc, a, x, training);
  return {tape.value(mu), tape.value(ls)};
}

Tape::Id reparameterize(Tape& tape, Tape::Id mu, Tape::Id log_var, const Tensor& epsilon) {
  Tape::Id stddev = tape.exp(tape.scale(log_var, 0.5));
  return tape.add(mu, tape.mul(stddev, tape.input(epsilon)));
}

LatentSample reparameterize_sample(const Tensor& mu, const Tensor& log_var, Rng& rng) {
  require(mu.same_shape(log_var), Errc::ShapeMismatch, "reparameterize shapes");
  LatentSample s;
  s.mu = mu;
  s.log_sigma = log_var;
  s.epsilon_used = Tensor::zeros_like(mu);
  for (double& v : s.epsilon_used.data) v = rng.normal();
  s.z = mu;
  for (std::size_t i = 0; i < mu.numel(); ++i)
    s.z[i] = mu[i] + s.epsilon_used[i] * std::exp(log_var[i] * 0.5);
  return s;
}

Tape::Id decode(Tape& tape, DecoderState& dec, Tape::Id z, bool training) {
  Tape::Id h = z;
  for (std::size_t i = 0; i < dec.stages.size(); ++i) {
    DecoderState::Stage& s = dec.stages[i];
    h = tape.add_bias(tape.matmul(h, tape.param(s.weight)), tape.param(s.bias));
    if (s.has_bn)
      h = tape.mish(tape.batch_norm(h, s.bn, training));
    else
      h = tape.tanh(h);
  }
  return h;
}

Tensor decode_eval(DecoderState& dec, const Tensor& z_rows) {
  Tape tape;
  return tape.value(decode(tape, dec, tape.input(z_rows), false));
}

Tensor decode_one(DecoderState& dec, const Tensor& z_vec) {
  Tensor row({1, z_vec.numel()});
  row.data = z_vec.data;
  Tensor flat = decode_eval(dec, row);
  Tensor out({dec.out_rows, dec.out_cols});
  out.data = std::move(flat.data);
  return out;
}

double kl_loss(const Tensor& mu, const Tensor& log_var) {
  require(mu.same_shape(log_var), Errc::ShapeMismatch, "kl_loss shapes");
  double total = 0.0;
  for (std::size_t i = 0; i < mu.numel(); ++i)
    total += -0.5 * (1.0 + log_var[i] - mu[i] * mu[i] - std::exp(log_var[i]));
  return total;
}

double recon_loss(const Tensor& x_hat, const Tensor& x) {
  require(x_hat.same_shape(x), Errc::ShapeMismatch, "recon_loss shapes");
  double s = 0.0;
  for (std::size_t i = 0; i < x.numel(); ++i) {
    const double d = x_hat[i] - x[i];
    s += d * d;
  }
  return s / static_cast<double>(x.numel());
}

void collect_parameters(GraphConvBlock& b, std::vector<Parameter*>& out) {
  out.push_back(&b.weight);
  out.push_back(&b.bias);
  out.push_back(&b.bn.scale);
  out.push_back(&b.bn.shift);
  if (b.projection) out.push_back(&*b.projection);
}

void collect_parameters(EncoderState& e, std::vector<Parameter*>& out) {
  for (GraphConvBlock& b : e.blocks) collect_parameters(b, out);
  out.push_back(&e.head_mu_w);
  out.push_back(&e.head_mu_b);
  out.push_back(&e.head_ls_w);
  out.push_back(&e.head_ls_b);
}

void collect_parameters(DecoderState& d, std::vector<Parameter*>& out) {
  for (DecoderState::Stage& s : d.stages) {
    out.push_back(&s.weight);
    out.push_back(&s.bias);
    if (s.has_bn) {
      out.push_back(&s.bn.scale);
      out.push_back(&s.bn.shift);
    }
  }
}

}  // namespace tsgdiff
