#include "tsgdiff/plots.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <vector>

namespace tsgdiff {

namespace {

constexpr std::size_t kGridPoints = 256;
constexpr double kInvSqrt2Pi = 0.39894228040143267794;

// Silverman's rule of thumb: 0.9 min(sd, IQR/1.34) n^{-1/5}.
double silverman_bandwidth(std::vector<double> values) {
  const std::size_t n = values.size();
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double v : values) var += (v - mean) * (v - mean);
  const double sd = std::sqrt(var / static_cast<double>(n));

  std::sort(values.begin(), values.end());
  auto quantile = [&values, n](double q) {
    const double pos = q * static_cast<double>(n - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    const std::size_t hi = std::min(lo + 1, n - 1);
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[hi] * frac;
  };
  const double iqr = quantile(0.75) - quantile(0.25);

  double spread = sd;
  if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
  double h = 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
  if (h <= 0.0) h = 1e-3;  // constant data: keep the kernel well-defined
  return h;
}

std::vector<double> kde_on_grid(const std::vector<double>& values, double h,
                                const std::vector<double>& grid) {
  std::vector<double> density(grid.size(), 0.0);
  const double norm = kInvSqrt2Pi / (h * static_cast<double>(values.size()));
  for (std::size_t g = 0; g < grid.size(); ++g) {
    double s = 0.0;
    for (double v : values) {
      const double u = (grid[g] - v) / h;
      s += std::exp(-0.5 * u * u);
    }
    density[g] = s * norm;
  }
  return density;
}

}  // namespace

std::string kde_csv(const Tensor& real_windows, const Tensor& synth_windows) {
  require(real_windows.numel() > 0 && synth_windows.numel() > 0, Errc::EmptySampleSet,
          "kde needs non-empty datasets");
  const std::vector<double>& rv = real_windows.data;
  const std::vector<double>& sv = synth_windows.data;

  const double h_real = silverman_bandwidth(rv);
  const double h_synth = silverman_bandwidth(sv);
  const double pad = 3.0 * std::max(h_real, h_synth);

  double lo = std::min(*std::min_element(rv.begin(), rv.end()),
                       *std::min_element(sv.begin(), sv.end())) -
              pad;
  double hi = std::max(*std::max_element(rv.begin(), rv.end()),
                       *std::max_element(sv.begin(), sv.end())) +
              pad;
  if (lo == hi) {
    lo -= 1.0;
    hi += 1.0;
  }

  std::vector<double> grid(kGridPoints);
  for (std::size_t i = 0; i < kGridPoints; ++i)
    grid[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(kGridPoints - 1);

  const std::vector<double> d_real = kde_on_grid(rv, h_real, grid);
  const std::vector<double> d_synth = kde_on_grid(sv, h_synth, grid);

  std::ostringstream out;
  out.precision(17);
  out << "x,density_real,density_synth\n";
  for (std::size_t i = 0; i < kGridPoints; ++i)
    out << grid[i] << ',' << d_real[i] << ',' << d_synth[i] << '\n';
  return out.str();
}

std::string pca_csv(const Tensor& real_windows, const Tensor& synth_windows) {
  require(real_windows.ndim() == 3 && synth_windows.ndim() == 3, Errc::ShapeMismatch,
          "pca expects M x w x D windows");
  const std::size_t f = real_windows.shape[1] * real_windows.shape[2];
  require(synth_windows.shape[1] * synth_windows.shape[2] == f, Errc::DimensionMismatch,
          "window shapes differ");
  const std::size_t m_real = real_windows.shape[0];
  const std::size_t m_synth = synth_windows.shape[0];
  require(m_real > 0 && m_synth > 0, Errc::EmptySampleSet, "pca needs non-empty datasets");

  // Mean over the real rows; components fitted on real only.
  std::vector<double> mean(f, 0.0);
  for (std::size_t i = 0; i < m_real; ++i)
    for (std::size_t j = 0; j < f; ++j) mean[j] += real_windows.data[i * f + j];
  for (double& v : mean) v /= static_cast<double>(m_real);

  Tensor cov({f, f});
  for (std::size_t i = 0; i < m_real; ++i) {
    const double* row = real_windows.data.data() + i * f;
    for (std::size_t a = 0; a < f; ++a) {
      const double da = row[a] - mean[a];
      if (da == 0.0) continue;
      for (std::size_t b = 0; b < f; ++b) cov.at(a, b) += da * (row[b] - mean[b]);
    }
  }
  for (double& v : cov.data) v /= static_cast<double>(m_real);

  // Top two eigenvectors by power iteration with deflation. A deterministic
  // start vector keeps the export reproducible.
  auto power_component = [&cov, f](const std::vector<double>& deflate) {
    std::vector<double> v(f);
    for (std::size_t i = 0; i < f; ++i) v[i] = 1.0 / std::sqrt(static_cast<double>(f) + i);
    double norm = 0.0;
    for (std::size_t iter = 0; iter < 300; ++iter) {
      if (!deflate.empty()) {
        double d = 0.0;
        for (std::size_t i = 0; i < f; ++i) d += v[i] * deflate[i];
        for (std::size_t i = 0; i < f; ++i) v[i] -= d * deflate[i];
      }
      std::vector<double> next(f, 0.0);
      for (std::size_t a = 0; a < f; ++a) {
        const double va = v[a];
        if (va == 0.0) continue;
        for (std::size_t b = 0; b < f; ++b) next[b] += va * cov.at(a, b);
      }
      norm = 0.0;
      for (double x : next) norm += x * x;
      norm = std::sqrt(norm);
      if (norm < 1e-300) return std::vector<double>(f, 0.0);  // zero-variance data
      for (std::size_t i = 0; i < f; ++i) v[i] = next[i] / norm;
    }
    return v;
  };

  const std::vector<double> pc1 = power_component({});
  const std::vector<double> pc2 = power_component(pc1);

  std::ostringstream out;
  out.precision(17);
  out << "pc1,pc2,label\n";
  auto emit = [&](const Tensor& windows, std::size_t m, const char* label) {
    for (std::size_t i = 0; i < m; ++i) {
      const double* row = windows.data.data() + i * f;
      double a = 0.0, b = 0.0;
      for (std::size_t j = 0; j < f; ++j) {
        const double c = row[j] - mean[j];
        a += c * pc1[j];
        b += c * pc2[j];
      }
      out << a << ',' << b << ',' << label << '\n';
    }
  };
  emit(real_windows, m_real, "real");
  emit(synth_windows, m_synth, "synth");
  return out.str();
}

void export_plot_data(const Tensor& real_windows, const Tensor& synth_windows,
                      const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  const auto write = [&out_dir](const char* name, const std::string& text) {
    const std::string path = out_dir + "/" + name;
    std::ofstream out(path);
    if (!out) fail(Errc::IoError, "cannot write " + path);
    out << text;
  };
  write("kde.csv", kde_csv(real_windows, synth_windows));
  write("pca.csv", pca_csv(real_windows, synth_windows));
}

}  // namespace tsgdiff
