#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "tsgdiff/tensor.hpp"

namespace tsgdiff {

// Learnable tensor with its gradient accumulator and Adam state.
struct Parameter {
  Tensor value;
  Tensor grad;
  Tensor adam_m;
  Tensor adam_v;
  std::int64_t step_count = 0;

  Parameter() = default;
  explicit Parameter(Tensor v)
      : value(std::move(v)),
        grad(Tensor::zeros_like(value)),
        adam_m(Tensor::zeros_like(value)),
        adam_v(Tensor::zeros_like(value)) {}

  void zero_grad() { grad.fill(0.0); }
};

// Per-channel batch normalization state. Scale and shift are trained; the
// running statistics are buffers updated in training mode and consumed in
// inference mode.
struct BatchNormState {
  Parameter scale;
  Parameter shift;
  Tensor running_mean;
  Tensor running_var;
  double momentum = 0.1;
  double epsilon = 1e-5;

  BatchNormState() = default;
  explicit BatchNormState(std::size_t channels)
      : scale(Tensor::full({channels}, 1.0)),
        shift(Tensor::zeros({channels})),
        running_mean(Tensor::zeros({channels})),
        running_var(Tensor::full({channels}, 1.0)) {}

  std::size_t channels() const { return scale.value.numel(); }
};

// Reverse-mode tape. Operations append nodes in execution order; backward()
// walks them in exact reverse order, accumulating gradients additively when a
// value feeds several consumers. One tape is one single-threaded unit of work.
class Tape {
 public:
  using Id = std::uint32_t;

  Tape() = default;

  // Constant leaf: no gradient is propagated into it.
  Id input(Tensor v);

  // Learnable leaf. Repeated calls with the same Parameter return the same
  // node, so shared weights accumulate gradients naturally. After backward()
  // the node gradient is added into p.grad.
  Id param(Parameter& p);

  Id matmul(Id a, Id b);
  Id add(Id a, Id b);
  Id sub(Id a, Id b);
  Id add_bias(Id x, Id bias);  // bias is a length-F vector added to each row
  Id scale(Id a, double c);
  Id mul(Id a, Id b);  // element-wise
  Id exp(Id a);
  Id mish(Id a);
  Id tanh(Id a);
  Id relu(Id a);
  Id mean_pool_rows(Id x);  // N x F -> 1 x F
  Id concat_cols(Id a, Id b);
  Id vstack(std::span<const Id> parts);  // stack row blocks of equal width

  // In training mode normalizes each channel over the row axis with batch
  // statistics and updates the running statistics; in inference mode uses the
  // running statistics. Requires >= 2 rows in training mode.
  Id batch_norm(Id x, BatchNormState& bn, bool training);

  // Scalar losses (shape {1}).
  Id mse(Id a, Id b);
  // -1/2 * sum_j (1 + ls_j - mu_j^2 - e^{ls_j}) per row, averaged over rows.
  // ls holds log(sigma^2).
  Id kl_divergence(Id mu, Id log_var);
  // Each row of a and b is one w x d window (row-major). Full unnormalized
  // DFT over the time axis per variable; mean squared difference over the
  // real and imaginary parts of all bins, variables and rows.
  Id spectral_mse(Id a, Id b, std::size_t w, std::size_t d);
  Id weighted_sum(std::span<const std::pair<Id, double>> terms);

  void backward(Id root);

  const Tensor& value(Id id) const { return nodes_[id].value; }
  const Tensor& grad(Id id) const { return nodes_[id].grad; }
  std::size_t size() const { return nodes_.size(); }

 private:
  struct Node {
    Tensor value;
    Tensor grad;
    bool requires_grad = false;
    std::function<void(Tape&)> backprop;  // empty for leaves
  };

  Id push(Tensor value, bool requires_grad, std::function<void(Tape&)> backprop);
  Tensor& grad_mut(Id id) { return nodes_[id].grad; }
  bool needs(Id id) const { return nodes_[id].requires_grad; }

  std::vector<Node> nodes_;
  std::vector<std::pair<Parameter*, Id>> param_nodes_;
  std::unordered_map<const Parameter*, Id> param_ids_;
};

struct AdamConfig {
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

// Standard Adam update with bias correction; zeroes gradients afterwards.
void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg);

}  // namespace tsgdiff
