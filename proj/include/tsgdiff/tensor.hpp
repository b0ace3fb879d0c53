#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "tsgdiff/error.hpp"

namespace tsgdiff {

// Dense row-major tensor of 64-bit floats. Rank 1 or 2 everywhere in this
// project; the shape vector is kept generic so window batches can be 3-D.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  Tensor() = default;

  explicit Tensor(std::vector<std::size_t> s) : shape(std::move(s)) {
    data.assign(numel_of(shape), 0.0);
  }

  static std::size_t numel_of(const std::vector<std::size_t>& s) {
    std::size_t n = 1;
    for (std::size_t d : s) n *= d;
    return n;
  }

  static Tensor zeros(std::vector<std::size_t> s) { return Tensor(std::move(s)); }

  static Tensor full(std::vector<std::size_t> s, double v) {
    Tensor t(std::move(s));
    for (double& x : t.data) x = v;
    return t;
  }

  static Tensor zeros_like(const Tensor& o) { return Tensor(o.shape); }

  static Tensor row(std::vector<double> values) {
    Tensor t;
    t.shape = {1, values.size()};
    t.data = std::move(values);
    return t;
  }

  static Tensor vec(std::vector<double> values) {
    Tensor t;
    t.shape = {values.size()};
    t.data = std::move(values);
    return t;
  }

  static Tensor matrix(std::size_t r, std::size_t c, std::vector<double> values) {
    require(values.size() == r * c, Errc::ShapeMismatch, "matrix literal size");
    Tensor t;
    t.shape = {r, c};
    t.data = std::move(values);
    return t;
  }

  std::size_t numel() const { return data.size(); }
  std::size_t ndim() const { return shape.size(); }

  std::size_t rows() const {
    require(shape.size() == 2, Errc::ShapeMismatch, "rows() on non-matrix");
    return shape[0];
  }
  std::size_t cols() const {
    require(shape.size() == 2, Errc::ShapeMismatch, "cols() on non-matrix");
    return shape[1];
  }

  double& at(std::size_t i, std::size_t j) { return data[i * shape[1] + j]; }
  double at(std::size_t i, std::size_t j) const { return data[i * shape[1] + j]; }

  double& operator[](std::size_t i) { return data[i]; }
  double operator[](std::size_t i) const { return data[i]; }

  bool same_shape(const Tensor& o) const { return shape == o.shape; }

  bool all_finite() const {
    for (double v : data)
      if (!std::isfinite(v)) return false;
    return true;
  }

  void fill(double v) {
    for (double& x : data) x = v;
  }
};

}  // namespace tsgdiff
