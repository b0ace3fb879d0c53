#include "tsgdiff/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace tsgdiff {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

std::size_t TemporalGraph::edge_count() const {
  std::size_t twice = 0;
  for (double v : adjacency.data) twice += v != 0.0 ? 1 : 0;
  return twice / 2;
}

AmplitudeSpectrum dft_amplitudes(const std::vector<double>& window_column) {
  const std::size_t w = window_column.size();
  if (w < 4) fail(Errc::WindowTooShort, "window length " + std::to_string(w) + " < 4");
  AmplitudeSpectrum spec;
  spec.window_length = w;
  const std::size_t bins = w / 2;
  spec.amplitudes.resize(bins);
  for (std::size_t p = 1; p <= bins; ++p) {
    double re = 0.0, im = 0.0;
    for (std::size_t n = 0; n < w; ++n) {
      const double ang = -kTwoPi * static_cast<double>(p) * static_cast<double>(n) /
                         static_cast<double>(w);
      re += window_column[n] * std::cos(ang);
      im += window_column[n] * std::sin(ang);
    }
    spec.amplitudes[p - 1] = std::sqrt(re * re + im * im);
  }
  return spec;
}

AmplitudeSpectrum pool_spectra(const Tensor& window) {
  require(window.ndim() == 2 && window.cols() >= 1, Errc::ShapeMismatch, "pool_spectra window");
  const std::size_t w = window.rows(), d = window.cols();
  AmplitudeSpectrum pooled;
  std::vector<double> column(w);
  for (std::size_t j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < w; ++i) column[i] = window.at(i, j);
    AmplitudeSpectrum spec = dft_amplitudes(column);
    if (j == 0) {
      pooled = std::move(spec);
    } else {
      for (std::size_t p = 0; p < pooled.amplitudes.size(); ++p)
        pooled.amplitudes[p] += spec.amplitudes[p];
    }
  }
  for (double& a : pooled.amplitudes) a /= static_cast<double>(d);
  return pooled;
}

PeriodSet detect_top_periods(const AmplitudeSpectrum& spectrum, std::size_t k) {
  const std::vector<double>& a = spectrum.amplitudes;
  const std::size_t w = spectrum.window_length;
  const std::size_t n = a.size();

  // Candidate frequencies: strict local maxima, endpoints against their
  // single neighbor.
  std::vector<std::size_t> candidates;  // 1-based frequency indices
  for (std::size_t i = 0; i < n; ++i) {
    const bool left_ok = i == 0 || a[i] > a[i - 1];
    const bool right_ok = i + 1 == n || a[i] > a[i + 1];
    if (left_ok && right_ok) candidates.push_back(i + 1);
  }

  std::stable_sort(candidates.begin(), candidates.end(), [&a](std::size_t p, std::size_t q) {
    if (a[p - 1] != a[q - 1]) return a[p - 1] > a[q - 1];
    return p < q;
  });
  if (candidates.size() > k) candidates.resize(k);

  struct Hit {
    std::size_t period, freq;
    double amp;
  };
  std::vector<Hit> hits;
  for (std::size_t p : candidates) {
    const double ratio = static_cast<double>(w) / static_cast<double>(p);
    const std::size_t period = static_cast<std::size_t>(std::llround(ratio));
    if (period <= 1 || period >= w) continue;
    bool dup = false;
    for (const Hit& h : hits) dup = dup || h.period == period;
    if (dup) continue;
    hits.push_back({period, p, a[p - 1]});
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& x, const Hit& y) { return x.period < y.period; });

  PeriodSet out;
  for (const Hit& h : hits) {
    out.periods.push_back(h.period);
    out.source_frequencies.push_back(h.freq);
    out.source_amplitudes.push_back(h.amp);
  }
  return out;
}

TemporalGraph build_graph(const Tensor& window, const PeriodSet& periods) {
  require(window.ndim() == 2 && window.rows() >= 2, Errc::ShapeMismatch, "build_graph window");
  const std::size_t w = window.rows();
  TemporalGraph g;
  g.adjacency = Tensor({w, w});
  g.node_features = window;
  g.periods = periods;
  for (std::size_t i = 0; i + 1 < w; ++i) {
    g.adjacency.at(i, i + 1) = 1.0;
    g.adjacency.at(i + 1, i) = 1.0;
  }
  for (std::size_t tau : periods.periods) {
    require(tau >= 2 && tau < w, Errc::InvalidRange, "period out of range for window");
    for (std::size_t i = 0; i + tau < w; ++i) {
      g.adjacency.at(i, i + tau) = 1.0;
      g.adjacency.at(i + tau, i) = 1.0;
    }
  }
  return g;
}

TemporalGraph window_to_graph(const Tensor& window, std::size_t top_k) {
  return build_graph(window, detect_top_periods(pool_spectra(window), top_k));
}

std::string adjacency_edge_list(const Tensor& adjacency) {
  std::ostringstream out;
  const std::size_t w = adjacency.rows();
  for (std::size_t i = 0; i < w; ++i)
    for (std::size_t j = i + 1; j < w; ++j)
      if (adjacency.at(i, j) != 0.0) out << i << ' ' << j << '\n';
  return out.str();
}

std::string spectrum_csv(const AmplitudeSpectrum& spectrum) {
  std::ostringstream out;
  out << "p,amplitude\n";
  out.precision(17);
  for (std::size_t p = 1; p <= spectrum.bins(); ++p)
    out << p << ',' << spectrum.at_frequency(p) << '\n';
  return out.str();
}

}  // namespace tsgdiff
