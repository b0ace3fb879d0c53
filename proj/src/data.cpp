#include "tsgdiff/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace tsgdiff {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

double parse_cell(const std::string& cell, std::size_t row, std::size_t col) {
  const std::string t = trim(cell);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    fail(Errc::ParseError, "cell at row " + std::to_string(row) + ", column " +
                               std::to_string(col) + " is not numeric: '" + t + "'");
  if (!std::isfinite(v))
    fail(Errc::NonFinite, "cell at row " + std::to_string(row) + ", column " +
                              std::to_string(col) + " is not finite");
  return v;
}

}  // namespace

Tensor WindowBatch::window(std::size_t m) const {
  const std::size_t w = window_size(), d = features();
  Tensor out({w, d});
  const double* src = windows.data.data() + m * w * d;
  std::copy(src, src + w * d, out.data.begin());
  return out;
}

TimeSeriesTable load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::MissingFile, "cannot open " + path);

  std::string line;
  if (!std::getline(in, line)) fail(Errc::EmptyTable, path + " is empty");
  // Strip a UTF-8 BOM if present.
  if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF &&
      static_cast<unsigned char>(line[1]) == 0xBB && static_cast<unsigned char>(line[2]) == 0xBF)
    line.erase(0, 3);

  TimeSeriesTable table;
  table.source_path = path;
  table.feature_names = split_csv_line(line);
  if (table.feature_names.empty()) fail(Errc::EmptyTable, path + " has no header fields");
  const std::size_t d = table.feature_names.size();

  std::vector<double> values;
  std::size_t rows = 0;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() != d)
      fail(Errc::ParseError, "row " + std::to_string(line_no) + " has " +
                                 std::to_string(cells.size()) + " cells, expected " +
                                 std::to_string(d));
    for (std::size_t j = 0; j < d; ++j) values.push_back(parse_cell(cells[j], line_no, j + 1));
    ++rows;
  }
  if (rows == 0) fail(Errc::EmptyTable, path + " has a header but no data rows");

  table.values.shape = {rows, d};
  table.values.data = std::move(values);
  return table;
}

NormalizationParams fit_normalizer(const TimeSeriesTable& table) {
  require(table.length() >= 1 && table.features() >= 1, Errc::EmptyTable, "empty table");
  const std::size_t t = table.length(), d = table.features();
  NormalizationParams norm;
  norm.per_feature_min.assign(d, 0.0);
  norm.per_feature_max.assign(d, 0.0);
  for (std::size_t j = 0; j < d; ++j) {
    double lo = table.values.at(0, j), hi = lo;
    for (std::size_t i = 1; i < t; ++i) {
      lo = std::min(lo, table.values.at(i, j));
      hi = std::max(hi, table.values.at(i, j));
    }
    norm.per_feature_min[j] = lo;
    norm.per_feature_max[j] = hi;
  }
  return norm;
}

Tensor normalize_matrix(const Tensor& matrix, const NormalizationParams& norm) {
  require(matrix.ndim() == 2 && matrix.cols() == norm.features(), Errc::DimensionMismatch,
          "normalize: feature count mismatch");
  Tensor out = matrix;
  const std::size_t t = matrix.rows(), d = matrix.cols();
  for (std::size_t j = 0; j < d; ++j) {
    const double lo = norm.per_feature_min[j], hi = norm.per_feature_max[j];
    if (lo == hi) {
      for (std::size_t i = 0; i < t; ++i) out.at(i, j) = 0.0;
    } else {
      const double s = 2.0 / (hi - lo);
      for (std::size_t i = 0; i < t; ++i) out.at(i, j) = s * (matrix.at(i, j) - lo) - 1.0;
    }
  }
  return out;
}

Tensor normalize(const TimeSeriesTable& table, const NormalizationParams& norm) {
  return normalize_matrix(table.values, norm);
}

Tensor denormalize(const Tensor& matrix, const NormalizationParams& norm, std::size_t* clamped) {
  require(matrix.ndim() == 2 && matrix.cols() == norm.features(), Errc::DimensionMismatch,
          "denormalize: feature count mismatch");
  Tensor out = matrix;
  const std::size_t t = matrix.rows(), d = matrix.cols();
  std::size_t clipped = 0;
  for (std::size_t j = 0; j < d; ++j) {
    const double lo = norm.per_feature_min[j], hi = norm.per_feature_max[j];
    for (std::size_t i = 0; i < t; ++i) {
      double x = matrix.at(i, j);
      if (x < -1.0 || x > 1.0) {
        x = std::clamp(x, -1.0, 1.0);
        ++clipped;
      }
      out.at(i, j) = lo == hi ? lo : (x + 1.0) * 0.5 * (hi - lo) + lo;
    }
  }
  if (clamped) *clamped += clipped;
  return out;
}

WindowBatch slide_windows(const Tensor& matrix, std::size_t w, std::size_t stride) {
  require(matrix.ndim() == 2, Errc::DimensionMismatch, "slide_windows input");
  const std::size_t t = matrix.rows(), d = matrix.cols();
  require(w >= 1 && stride >= 1, Errc::InvalidRange, "window and stride must be positive");
  if (w > t) fail(Errc::WindowTooLarge, "window " + std::to_string(w) + " exceeds series length " +
                                            std::to_string(t));
  const std::size_t m = (t - w) / stride + 1;

  WindowBatch batch;
  batch.stride = stride;
  batch.windows = Tensor({m, w, d});
  batch.origin_indices.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t origin = i * stride;
    batch.origin_indices.push_back(origin);
    const double* src = matrix.data.data() + origin * d;
    double* dst = batch.windows.data.data() + i * w * d;
    std::copy(src, src + w * d, dst);
  }
  return batch;
}

}  // namespace tsgdiff
