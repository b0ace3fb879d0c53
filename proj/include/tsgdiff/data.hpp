#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsgdiff/tensor.hpp"

namespace tsgdiff {

// Raw T x D numeric series as loaded from disk.
struct TimeSeriesTable {
  Tensor values;  // T x D
  std::vector<std::string> feature_names;
  std::string source_path;

  std::size_t length() const { return values.rows(); }
  std::size_t features() const { return values.cols(); }
};

// Per-feature min-max statistics mapping data onto [-1, 1].
struct NormalizationParams {
  std::vector<double> per_feature_min;
  std::vector<double> per_feature_max;
  // Target range is fixed to (-1, +1): the decoder ends in Tanh, so this is
  // the only range its outputs can reproduce.
  static constexpr double target_lo = -1.0;
  static constexpr double target_hi = 1.0;

  std::size_t features() const { return per_feature_min.size(); }
  bool degenerate(std::size_t j) const { return per_feature_min[j] == per_feature_max[j]; }
};

// Stack of normalized windows cut from one series.
struct WindowBatch {
  Tensor windows;  // M x w x D
  std::size_t stride = 1;
  NormalizationParams norm;
  std::vector<std::size_t> origin_indices;

  std::size_t count() const { return windows.shape.empty() ? 0 : windows.shape[0]; }
  std::size_t window_size() const { return windows.shape[1]; }
  std::size_t features() const { return windows.shape[2]; }

  // Copy of window m as a w x D matrix.
  Tensor window(std::size_t m) const;
};

// Loads a UTF-8 comma-separated file: header row of feature names, then one
// finite numeric cell per column. Row/column indices in errors are 1-based
// (the header is line 1).
TimeSeriesTable load_csv(const std::string& path);

NormalizationParams fit_normalizer(const TimeSeriesTable& table);

// x' = 2 (x - min) / (max - min) - 1 per feature; constant features map to 0.
Tensor normalize(const TimeSeriesTable& table, const NormalizationParams& norm);
Tensor normalize_matrix(const Tensor& matrix, const NormalizationParams& norm);

// Exact right-inverse of normalize for non-degenerate features; degenerate
// features recover their constant. Inputs outside [-1, 1] are clamped and
// counted in *clamped when given.
Tensor denormalize(const Tensor& matrix, const NormalizationParams& norm,
                   std::size_t* clamped = nullptr);

// M = floor((T - w) / stride) + 1 windows; window m covers rows
// [m*stride, m*stride + w). The input is expected to be normalized already.
WindowBatch slide_windows(const Tensor& matrix, std::size_t w, std::size_t stride);

}  // namespace tsgdiff
