#include "tsgdiff/tape.hpp"

#include <cmath>

namespace tsgdiff {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

void check_finite(const Tensor& t, const char* op) {
  if (!t.all_finite()) fail(Errc::NonFiniteLoss, std::string("non-finite value produced by ") + op);
}

// c += a * b
void matmul_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  const double* pa = a.data.data();
  const double* pb = b.data.data();
  double* pc = c.data.data();
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = pa + i * k;
    double* ci = pc + i * m;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = ai[kk];
      if (av == 0.0) continue;
      const double* bk = pb + kk * m;
      for (std::size_t j = 0; j < m; ++j) ci[j] += av * bk[j];
    }
  }
}

// c += a^T * b  (a: n x k, b: n x m, c: k x m)
void matmul_at_b_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.cols();
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a.data.data() + i * k;
    const double* bi = b.data.data() + i * m;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const double av = ai[kk];
      if (av == 0.0) continue;
      double* ck = c.data.data() + kk * m;
      for (std::size_t j = 0; j < m; ++j) ck[j] += av * bi[j];
    }
  }
}

// c += a * b^T  (a: n x k, b: m x k, c: n x m)
void matmul_a_bt_acc(const Tensor& a, const Tensor& b, Tensor& c) {
  const std::size_t n = a.rows(), k = a.cols(), m = b.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const double* ai = a.data.data() + i * k;
    double* ci = c.data.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) {
      const double* bj = b.data.data() + j * k;
      double s = 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) s += ai[kk] * bj[kk];
      ci[j] += s;
    }
  }
}

}  // namespace

Tape::Id Tape::push(Tensor value, bool requires_grad, std::function<void(Tape&)> backprop) {
  Node n;
  n.value = std::move(value);
  n.grad = Tensor::zeros_like(n.value);
  n.requires_grad = requires_grad;
  n.backprop = std::move(backprop);
  nodes_.push_back(std::move(n));
  return static_cast<Id>(nodes_.size() - 1);
}

Tape::Id Tape::input(Tensor v) { return push(std::move(v), false, {}); }

Tape::Id Tape::param(Parameter& p) {
  auto it = param_ids_.find(&p);
  if (it != param_ids_.end()) return it->second;
  Id id = push(p.value, true, {});
  param_ids_.emplace(&p, id);
  param_nodes_.emplace_back(&p, id);
  return id;
}

Tape::Id Tape::matmul(Id a, Id b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.ndim() == 2 && tb.ndim() == 2 && ta.cols() == tb.rows(), Errc::ShapeMismatch,
          "matmul inner dimensions");
  Tensor out({ta.rows(), tb.cols()});
  matmul_acc(ta, tb, out);
  check_finite(out, "matmul");
  Id id = push(std::move(out), needs(a) || needs(b), {});
  nodes_[id].backprop = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    if (t.needs(a)) matmul_a_bt_acc(g, t.value(b), t.grad_mut(a));
    if (t.needs(b)) matmul_at_b_acc(t.value(a), g, t.grad_mut(b));
  };
  return id;
}

Tape::Id Tape::add(Id a, Id b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), Errc::ShapeMismatch, "add shapes");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] += tb[i];
  check_finite(out, "add");
  Id id = push(std::move(out), needs(a) || needs(b), {});
  nodes_[id].backprop = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    if (t.needs(a)) {
      Tensor& ga = t.grad_mut(a);
      for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i];
    }
    if (t.needs(b)) {
      Tensor& gb = t.grad_mut(b);
      for (std::size_t i = 0; i < g.numel(); ++i) gb[i] += g[i];
    }
  };
  return id;
}

Tape::Id Tape::sub(Id a, Id b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), Errc::ShapeMismatch, "sub shapes");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] -= tb[i];
  check_finite(out, "sub");
  Id id = push(std::move(out), needs(a) || needs(b), {});
  nodes_[id].backprop = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    if (t.needs(a)) {
      Tensor& ga = t.grad_mut(a);
      for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i];
    }
    if (t.needs(b)) {
      Tensor& gb = t.grad_mut(b);
      for (std::size_t i = 0; i < g.numel(); ++i) gb[i] -= g[i];
    }
  };
  return id;
}

Tape::Id Tape::add_bias(Id x, Id bias) {
  const Tensor& tx = value(x);
  const Tensor& tb = value(bias);
  require(tx.ndim() == 2 && tb.numel() == tx.cols(), Errc::ShapeMismatch, "add_bias width");
  Tensor out = tx;
  const std::size_t n = tx.rows(), f = tx.cols();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < f; ++j) out.at(i, j) += tb[j];
  check_finite(out, "add_bias");
  Id id = push(std::move(out), needs(x) || needs(bias), {});
  nodes_[id].backprop = [x, bias, id, n, f](Tape& t) {
    const Tensor& g = t.grad(id);
    if (t.needs(x)) {
      Tensor& gx = t.grad_mut(x);
      for (std::size_t i = 0; i < g.numel(); ++i) gx[i] += g[i];
    }
    if (t.needs(bias)) {
      Tensor& gb = t.grad_mut(bias);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f; ++j) gb[j] += g.at(i, j);
    }
  };
  return id;
}

Tape::Id Tape::scale(Id a, double c) {
  Tensor out = value(a);
  for (double& v : out.data) v *= c;
  check_finite(out, "scale");
  Id id = push(std::move(out), needs(a), {});
  nodes_[id].backprop = [a, c, id](Tape& t) {
    if (!t.needs(a)) return;
    const Tensor& g = t.grad(id);
    Tensor& ga = t.grad_mut(a);
    for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += c * g[i];
  };
  return id;
}

Tape::Id Tape::mul(Id a, Id b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), Errc::ShapeMismatch, "mul shapes");
  Tensor out = ta;
  for (std::size_t i = 0; i < out.numel(); ++i) out[i] *= tb[i];
  check_finite(out, "mul");
  Id id = push(std::move(out), needs(a) || needs(b), {});
  nodes_[id].backprop = [a, b, id](Tape& t) {
    const Tensor& g = t.grad(id);
    if (t.needs(a)) {
      Tensor& ga = t.grad_mut(a);
      const Tensor& vb = t.value(b);
      for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * vb[i];
    }
    if (t.needs(b)) {
      Tensor& gb = t.grad_mut(b);
      const Tensor& va = t.value(a);
      for (std::size_t i = 0; i < g.numel(); ++i) gb[i] += g[i] * va[i];
    }
  };
  return id;
}

Tape::Id Tape::exp(Id a) {
  Tensor out = value(a);
  for (double& v : out.data) v = std::exp(v);
  check_finite(out, "exp");
  Id id = push(std::move(out), needs(a), {});
  nodes_[id].backprop = [a, id](Tape& t) {
    if (!t.needs(a)) return;
    const Tensor& g = t.grad(id);
    const Tensor& y = t.value(id);
    Tensor& ga = t.grad_mut(a);
    for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * y[i];
  };
  return id;
}

Tape::Id Tape::mish(Id a) {
  const Tensor& ta = value(a);
  Tensor out = ta;
  for (double& v : out.data) v = v * std::tanh(softplus(v));
  check_finite(out, "mish");
  Id id = push(std::move(out), needs(a), {});
  nodes_[id].backprop = [a, id](Tape& t) {
    if (!t.needs(a)) return;
    const Tensor& g = t.grad(id);
    const Tensor& x = t.value(a);
    Tensor& ga = t.grad_mut(a);
    for (std::size_t i = 0; i < g.numel(); ++i) {
      const double xi = x[i];
      const double th = std::tanh(softplus(xi));
      const double sig = 1.0 / (1.0 + std::exp(-xi));
      ga[i] += g[i] * (th + xi * (1.0 - th * th) * sig);
    }
  };
  return id;
}

Tape::Id Tape::tanh(Id a) {
  Tensor out = value(a);
  for (double& v : out.data) v = std::tanh(v);
  check_finite(out, "tanh");
  Id id = push(std::move(out), needs(a), {});
  nodes_[id].backprop = [a, id](Tape& t) {
    if (!t.needs(a)) return;
    const Tensor& g = t.grad(id);
    const Tensor& y = t.value(id);
    Tensor& ga = t.grad_mut(a);
    for (std::size_t i = 0; i < g.numel(); ++i) ga[i] += g[i] * (1.0 - y[i] * y[i]);
  };
  return id;
}

Tape::Id Tape::relu(Id a) {
  Tensor out = value(a);
  for (double& v : out.data) v = v > 0.0 ? v : 0.0;
  Id id = push(std::move(out), needs(a), {});
  nodes_[id].backprop = [a, id](Tape& t) {
    if (!t.needs(a)) return;
    const Tensor& g = t.grad(id);
    const Tensor& x = t.value(a);
    Tensor& ga = t.grad_mut(a);
    for (std::size_t i = 0; i < g.numel(); ++i)
      if (x[i] > 0.0) ga[i] += g[i];
  };
  return id;
}

Tape::Id Tape::mean_pool_rows(Id x) {
  const Tensor& tx = value(x);
  require(tx.ndim() == 2 && tx.rows() >= 1, Errc::ShapeMismatch, "mean_pool_rows input");
  const std::size_t n = tx.rows(), f = tx.cols();
  Tensor out({1, f});
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < f; ++j) out[j] += tx.at(i, j);
  for (std::size_t j = 0; j < f; ++j) out[j] /= static_cast<double>(n);
  Id id = push(std::move(out), needs(x), {});
  nodes_[id].backprop = [x, id, n, f](Tape& t) {
    if (!t.needs(x)) return;
    const Tensor& g = t.grad(id);
    Tensor& gx = t.grad_mut(x);
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < f; ++j) gx[i * f + j] += g[j] * inv;
  };
  return id;
}

Tape::Id Tape::concat_cols(Id a, Id b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.ndim() == 2 && tb.ndim() == 2 && ta.rows() == tb.rows(), Errc::ShapeMismatch,
          "concat_cols row counts");
  const std::size_t n = ta.rows(), fa = ta.cols(), fb = tb.cols();
  Tensor out({n, fa + fb});
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < fa; ++j) out.at(i, j) = ta.at(i, j);
    for (std::size_t j = 0; j < fb; ++j) out.at(i, fa + j) = tb.at(i, j);
  }
  Id id = push(std::move(out), needs(a) || needs(b), {});
  nodes_[id].backprop = [a, b, id, n, fa, fb](Tape& t) {
    const Tensor& g = t.grad(id);
    if (t.needs(a)) {
      Tensor& ga = t.grad_mut(a);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < fa; ++j) ga[i * fa + j] += g.at(i, j);
    }
    if (t.needs(b)) {
      Tensor& gb = t.grad_mut(b);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < fb; ++j) gb[i * fb + j] += g.at(i, fa + j);
    }
  };
  return id;
}

Tape::Id Tape::vstack(std::span<const Id> parts) {
  require(!parts.empty(), Errc::ShapeMismatch, "vstack of nothing");
  const std::size_t f = value(parts[0]).cols();
  std::size_t total = 0;
  bool rg = false;
  for (Id p : parts) {
    require(value(p).ndim() == 2 && value(p).cols() == f, Errc::ShapeMismatch, "vstack widths");
    total += value(p).rows();
    rg = rg || needs(p);
  }
  Tensor out({total, f});
  std::size_t r = 0;
  for (Id p : parts) {
    const Tensor& tp = value(p);
    for (std::size_t i = 0; i < tp.numel(); ++i) out[r * f + i] = tp[i];
    r += tp.rows();
  }
  std::vector<Id> owned(parts.begin(), parts.end());
  Id id = push(std::move(out), rg, {});
  nodes_[id].backprop = [owned, id, f](Tape& t) {
    const Tensor& g = t.grad(id);
    std::size_t r = 0;
    for (Id p : owned) {
      const std::size_t rows = t.value(p).rows();
      if (t.needs(p)) {
        Tensor& gp = t.grad_mut(p);
        for (std::size_t i = 0; i < rows * f; ++i) gp[i] += g[r * f + i];
      }
      r += rows;
    }
  };
  return id;
}

Tape::Id Tape::batch_norm(Id x, BatchNormState& bn, bool training) {
  const Tensor& tx = value(x);
  require(tx.ndim() == 2 && tx.cols() == bn.channels(), Errc::ShapeMismatch, "batch_norm channels");
  const std::size_t n = tx.rows(), f = tx.cols();
  require(!training || n >= 2, Errc::ShapeMismatch, "batch_norm needs >= 2 rows in training mode");

  Id scale_id = param(bn.scale);
  Id shift_id = param(bn.shift);

  Tensor mean({f});
  Tensor var({f});
  if (training) {
    for (std::size_t j = 0; j < f; ++j) {
      double m = 0.0;
      for (std::size_t i = 0; i < n; ++i) m += tx.at(i, j);
      m /= static_cast<double>(n);
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = tx.at(i, j) - m;
        v += d * d;
      }
      v /= static_cast<double>(n);
      mean[j] = m;
      var[j] = v;
      bn.running_mean[j] = (1.0 - bn.momentum) * bn.running_mean[j] + bn.momentum * m;
      bn.running_var[j] = (1.0 - bn.momentum) * bn.running_var[j] + bn.momentum * v;
    }
  } else {
    mean = bn.running_mean;
    var = bn.running_var;
  }

  Tensor xhat({n, f});
  Tensor out({n, f});
  const Tensor& gamma = bn.scale.value;
  const Tensor& beta = bn.shift.value;
  std::vector<double> inv_std(f);
  for (std::size_t j = 0; j < f; ++j) inv_std[j] = 1.0 / std::sqrt(var[j] + bn.epsilon);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < f; ++j) {
      const double xh = (tx.at(i, j) - mean[j]) * inv_std[j];
      xhat.at(i, j) = xh;
      out.at(i, j) = gamma[j] * xh + beta[j];
    }
  }
  check_finite(out, "batch_norm");

  Id id = push(std::move(out), true, {});
  auto xhat_shared = std::make_shared<Tensor>(std::move(xhat));
  auto inv_std_shared = std::make_shared<std::vector<double>>(std::move(inv_std));
  nodes_[id].backprop = [x, scale_id, shift_id, id, n, f, training, xhat_shared,
                         inv_std_shared](Tape& t) {
    const Tensor& g = t.grad(id);
    const Tensor& xh = *xhat_shared;
    const std::vector<double>& istd = *inv_std_shared;
    const Tensor& gamma = t.value(scale_id);

    Tensor& gscale = t.grad_mut(scale_id);
    Tensor& gshift = t.grad_mut(shift_id);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < f; ++j) {
        gscale[j] += g.at(i, j) * xh.at(i, j);
        gshift[j] += g.at(i, j);
      }

    if (!t.needs(x)) return;
    Tensor& gx = t.grad_mut(x);
    if (training) {
      // Standard batch-norm input gradient with biased batch variance.
      for (std::size_t j = 0; j < f; ++j) {
        double sum_g = 0.0, sum_gx = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          sum_g += g.at(i, j);
          sum_gx += g.at(i, j) * xh.at(i, j);
        }
        const double inv_n = 1.0 / static_cast<double>(n);
        for (std::size_t i = 0; i < n; ++i) {
          const double gy = g.at(i, j);
          gx[i * f + j] +=
              gamma[j] * istd[j] * (gy - inv_n * sum_g - xh.at(i, j) * inv_n * sum_gx);
        }
      }
    } else {
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < f; ++j) gx[i * f + j] += g.at(i, j) * gamma[j] * istd[j];
    }
  };
  return id;
}

Tape::Id Tape::mse(Id a, Id b) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb), Errc::ShapeMismatch, "mse shapes");
  const std::size_t n = ta.numel();
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = ta[i] - tb[i];
    s += d * d;
  }
  Tensor out({1});
  out[0] = s / static_cast<double>(n);
  check_finite(out, "mse");
  Id id = push(std::move(out), needs(a) || needs(b), {});
  nodes_[id].backprop = [a, b, id, n](Tape& t) {
    const double g = t.grad(id)[0];
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    const double c = 2.0 * g / static_cast<double>(n);
    if (t.needs(a)) {
      Tensor& ga = t.grad_mut(a);
      for (std::size_t i = 0; i < n; ++i) ga[i] += c * (va[i] - vb[i]);
    }
    if (t.needs(b)) {
      Tensor& gb = t.grad_mut(b);
      for (std::size_t i = 0; i < n; ++i) gb[i] -= c * (va[i] - vb[i]);
    }
  };
  return id;
}

Tape::Id Tape::kl_divergence(Id mu, Id log_var) {
  const Tensor& tm = value(mu);
  const Tensor& tl = value(log_var);
  require(tm.same_shape(tl) && tm.ndim() == 2, Errc::ShapeMismatch, "kl_divergence shapes");
  const std::size_t n = tm.rows(), e = tm.cols();
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < e; ++j) {
      const double m = tm.at(i, j), l = tl.at(i, j);
      total += -0.5 * (1.0 + l - m * m - std::exp(l));
    }
  Tensor out({1});
  out[0] = total / static_cast<double>(n);
  check_finite(out, "kl_divergence");
  Id id = push(std::move(out), needs(mu) || needs(log_var), {});
  nodes_[id].backprop = [mu, log_var, id, n](Tape& t) {
    const double g = t.grad(id)[0] / static_cast<double>(n);
    const Tensor& tm = t.value(mu);
    const Tensor& tl = t.value(log_var);
    if (t.needs(mu)) {
      Tensor& gm = t.grad_mut(mu);
      for (std::size_t i = 0; i < tm.numel(); ++i) gm[i] += g * tm[i];
    }
    if (t.needs(log_var)) {
      Tensor& gl = t.grad_mut(log_var);
      for (std::size_t i = 0; i < tl.numel(); ++i) gl[i] += g * (-0.5) * (1.0 - std::exp(tl[i]));
    }
  };
  return id;
}

Tape::Id Tape::spectral_mse(Id a, Id b, std::size_t w, std::size_t d) {
  const Tensor& ta = value(a);
  const Tensor& tb = value(b);
  require(ta.same_shape(tb) && ta.ndim() == 2 && ta.cols() == w * d, Errc::ShapeMismatch,
          "spectral_mse shapes");
  const std::size_t rows = ta.rows();

  // Forward: full DFT per window row and variable; accumulate squared
  // real/imaginary differences over all bins.
  double total = 0.0;
  for (std::size_t r = 0; r < rows; ++r) {
    const double* xa = ta.data.data() + r * w * d;
    const double* xb = tb.data.data() + r * w * d;
    for (std::size_t v = 0; v < d; ++v) {
      for (std::size_t p = 0; p < w; ++p) {
        double re = 0.0, im = 0.0;
        for (std::size_t n = 0; n < w; ++n) {
          const double diff = xa[n * d + v] - xb[n * d + v];
          const double ang = -kTwoPi * static_cast<double>(p) * static_cast<double>(n) /
                             static_cast<double>(w);
          re += diff * std::cos(ang);
          im += diff * std::sin(ang);
        }
        total += re * re + im * im;
      }
    }
  }
  const double denom = static_cast<double>(2 * w * d * rows);
  Tensor out({1});
  out[0] = total / denom;
  check_finite(out, "spectral_mse");

  // By Parseval, sum_p |DFT(diff)_p|^2 = w * sum_n diff_n^2, so the exact
  // gradient is diff / (d * rows) per element.
  Id id = push(std::move(out), needs(a) || needs(b), {});
  nodes_[id].backprop = [a, b, id, d, rows](Tape& t) {
    const double g = t.grad(id)[0];
    const Tensor& va = t.value(a);
    const Tensor& vb = t.value(b);
    const double c = g / static_cast<double>(d * rows);
    if (t.needs(a)) {
      Tensor& ga = t.grad_mut(a);
      for (std::size_t i = 0; i < va.numel(); ++i) ga[i] += c * (va[i] - vb[i]);
    }
    if (t.needs(b)) {
      Tensor& gb = t.grad_mut(b);
      for (std::size_t i = 0; i < va.numel(); ++i) gb[i] -= c * (va[i] - vb[i]);
    }
  };
  return id;
}

Tape::Id Tape::weighted_sum(std::span<const std::pair<Id, double>> terms) {
  require(!terms.empty(), Errc::ShapeMismatch, "weighted_sum of nothing");
  double total = 0.0;
  bool rg = false;
  for (const auto& [tid, wgt] : terms) {
    require(value(tid).numel() == 1, Errc::ShapeMismatch, "weighted_sum needs scalars");
    total += wgt * value(tid)[0];
    rg = rg || needs(tid);
  }
  Tensor out({1});
  out[0] = total;
  check_finite(out, "weighted_sum");
  std::vector<std::pair<Id, double>> owned(terms.begin(), terms.end());
  Id id = push(std::move(out), rg, {});
  nodes_[id].backprop = [owned, id](Tape& t) {
    const double g = t.grad(id)[0];
    for (const auto& [tid, wgt] : owned)
      if (t.needs(tid)) t.grad_mut(tid)[0] += g * wgt;
  };
  return id;
}

void Tape::backward(Id root) {
  require(value(root).numel() == 1, Errc::ShapeMismatch, "backward root must be scalar");
  grad_mut(root)[0] = 1.0;
  for (std::size_t i = nodes_.size(); i-- > 0;) {
    Node& n = nodes_[i];
    if (n.requires_grad && n.backprop) n.backprop(*this);
  }
  for (auto& [p, id] : param_nodes_) {
    const Tensor& g = grad(id);
    for (std::size_t i = 0; i < g.numel(); ++i) p->grad[i] += g[i];
  }
}

void adam_step(std::span<Parameter* const> params, const AdamConfig& cfg) {
  for (Parameter* p : params) {
    p->step_count += 1;
    const double t = static_cast<double>(p->step_count);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (std::size_t i = 0; i < p->value.numel(); ++i) {
      const double g = p->grad[i];
      p->adam_m[i] = cfg.beta1 * p->adam_m[i] + (1.0 - cfg.beta1) * g;
      p->adam_v[i] = cfg.beta2 * p->adam_v[i] + (1.0 - cfg.beta2) * g * g;
      const double mhat = p->adam_m[i] / bc1;
      const double vhat = p->adam_v[i] / bc2;
      p->value[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
    }
    p->zero_grad();
  }
}

}  // namespace tsgdiff
