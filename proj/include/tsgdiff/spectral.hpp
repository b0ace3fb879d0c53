#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tsgdiff/tensor.hpp"

namespace tsgdiff {

// Amplitudes of frequency bins p = 1 .. floor(w/2); the DC bin is excluded.
struct AmplitudeSpectrum {
  std::vector<double> amplitudes;
  std::size_t window_length = 0;

  std::size_t bins() const { return amplitudes.size(); }
  // Amplitude of frequency index p (1-based).
  double at_frequency(std::size_t p) const { return amplitudes[p - 1]; }
};

// Dominant periods detected from a spectrum, each in [2, w-1].
struct PeriodSet {
  std::vector<std::size_t> periods;  // distinct, ascending
  std::vector<std::size_t> source_frequencies;
  std::vector<double> source_amplitudes;

  bool empty() const { return periods.empty(); }
  std::size_t size() const { return periods.size(); }
};

// Graph over a window's time steps: consecutive-step edges plus links between
// nodes separated by a detected dominant period.
struct TemporalGraph {
  Tensor adjacency;      // w x w, entries in {0, 1}, symmetric, zero diagonal
  Tensor node_features;  // w x D
  PeriodSet periods;

  std::size_t nodes() const { return adjacency.rows(); }
  std::size_t edge_count() const;
};

// |sum_n x[n] e^{-j 2 pi p n / w}| for p = 1 .. floor(w/2), direct evaluation.
AmplitudeSpectrum dft_amplitudes(const std::vector<double>& window_column);

// Element-wise mean of the per-variable amplitude spectra of a w x D window.
AmplitudeSpectrum pool_spectra(const Tensor& window);

// Strict local maxima of the amplitude sequence (endpoints compare against
// their single neighbor); the k largest by amplitude are kept with ties
// broken toward the lower frequency index, mapped to round(w/p), deduplicated
// and restricted to [2, w-1]. Fewer than k results are permitted.
PeriodSet detect_top_periods(const AmplitudeSpectrum& spectrum, std::size_t k = 3);

TemporalGraph build_graph(const Tensor& window, const PeriodSet& periods);

// Full pipeline for one normalized window: pooled spectrum, top-k periods,
// graph.
TemporalGraph window_to_graph(const Tensor& window, std::size_t top_k = 3);

// Debug exports consumed by tests and the build-graphs command.
std::string adjacency_edge_list(const Tensor& adjacency);
std::string spectrum_csv(const AmplitudeSpectrum& spectrum);

}  // namespace tsgdiff
