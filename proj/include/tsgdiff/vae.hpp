#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "tsgdiff/rng.hpp"
#include "tsgdiff/spectral.hpp"
#include "tsgdiff/tape.hpp"

namespace tsgdiff {

// One graph convolution: y' = Mish(BN(A X W + b)) with batch normalization
// over the node axis, plus a residual connection. When the widths differ the
// residual goes through a learned linear projection.
struct GraphConvBlock {
  Parameter weight;  // F_in x F_out
  Parameter bias;    // F_out
  BatchNormState bn;
  std::optional<Parameter> projection;  // present iff F_in != F_out

  GraphConvBlock() = default;
  GraphConvBlock(std::size_t f_in, std::size_t f_out, Rng& rng);
};

struct EncoderState {
  std::vector<GraphConvBlock> blocks;  // 3 stacked blocks
  Parameter head_mu_w, head_mu_b;
  Parameter head_ls_w, head_ls_b;  // log(sigma^2) head
  std::size_t latent_dim = 0;

  EncoderState() = default;
  EncoderState(std::size_t d, std::size_t hidden, std::size_t latent, Rng& rng);
};

// Four affine stages widening E -> 2E -> 4E -> 4E -> w*D; BN + Mish on the
// first three, Tanh on the last.
struct DecoderState {
  struct Stage {
    Parameter weight, bias;
    BatchNormState bn;
    bool has_bn = true;
  };
  std::vector<Stage> stages;
  std::size_t out_rows = 0;  // w
  std::size_t out_cols = 0;  // D

  DecoderState() = default;
  DecoderState(std::size_t latent, std::size_t w, std::size_t d, Rng& rng);
};

// Record of one reparameterized draw; z is exactly recomputable from the
// other three fields.
struct LatentSample {
  Tensor mu, log_sigma, z, epsilon_used;
};

Tape::Id graph_conv_forward(Tape& tape, GraphConvBlock& block, Tape::Id adjacency, Tape::Id x,
                            bool training);

// Returns (mu, log sigma^2) as 1 x E rows for one graph.
std::pair<Tape::Id, Tape::Id> encode(Tape& tape, EncoderState& enc, Tape::Id adjacency,
                                     Tape::Id node_features, bool training);
std::pair<Tensor, Tensor> encode_eval(EncoderState& enc, const TemporalGraph& graph,
                                      bool training = false);

// z = mu + eps * exp(log_var / 2), element-wise, with the given noise rows.
Tape::Id reparameterize(Tape& tape, Tape::Id mu, Tape::Id log_var, const Tensor& epsilon);
LatentSample reparameterize_sample(const Tensor& mu, const Tensor& log_var, Rng& rng);

// Decodes n x E latent rows into n x (w*D) rows.
Tape::Id decode(Tape& tape, DecoderState& dec, Tape::Id z, bool training);
// Inference-mode decode of latent rows; reshapes a single row to w x D.
Tensor decode_eval(DecoderState& dec, const Tensor& z_rows);
Tensor decode_one(DecoderState& dec, const Tensor& z_vec);

double kl_loss(const Tensor& mu, const Tensor& log_var);
double recon_loss(const Tensor& x_hat, const Tensor& x);

void collect_parameters(GraphConvBlock& b, std::vector<Parameter*>& out);
void collect_parameters(EncoderState& e, std::vector<Parameter*>& out);
void collect_parameters(DecoderState& d, std::vector<Parameter*>& out);

}  // namespace tsgdiff
