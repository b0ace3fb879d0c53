#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tsgdiff/rng.hpp"
#include "tsgdiff/spectral.hpp"
#include "tsgdiff/tensor.hpp"

namespace tsgdiff {

// Node-degree histogram of one adjacency matrix.
struct DegreeDistribution {
  std::vector<std::pair<std::size_t, std::size_t>> counts;  // (degree, occurrences), ascending
  std::size_t total_nodes = 0;
};

struct MetricReport {
  double topo_fid = 0.0;
  double s_edit_mean = 0.0;
  double s_entropy_mean = 0.0;
  double correlational = 0.0;
  double discriminative = 0.0;
  double predictive = 0.0;
  std::size_t pair_count = 0;
  std::uint64_t seed = 0;

  std::string to_json() const;
};

DegreeDistribution degree_distribution(const Tensor& adjacency);

// 1 - sum_{i,j} |A_ij - Ahat_ij| / N^2 over all ordered entries, diagonal
// included.
double graph_edit_similarity(const Tensor& a, const Tensor& a_hat);

// Base-2 entropy of the degree distribution with the epsilon guard inside
// the logarithm.
double structural_entropy(const Tensor& adjacency);

// 1 / (1 + |H(A) - H(Ahat)|); dimension-free.
double entropy_similarity(const Tensor& a, const Tensor& a_hat);

struct TopoFidResult {
  double topo_fid = 0.0;
  double s_edit_mean = 0.0;
  double s_entropy_mean = 0.0;
  std::size_t pair_count = 0;
};

// Mean of alpha * S_edit + (1 - alpha) * S_entropy over sampled pairs.
// Pairing is uniform independent by default; identity pairing matches index
// i with index i (lists must then have equal length).
TopoFidResult topo_fid(const std::vector<TemporalGraph>& real_graphs,
                       const std::vector<TemporalGraph>& synth_graphs, double alpha,
                       std::size_t pairs, Rng& rng, bool identity_pairing = false);

// Mean absolute off-diagonal difference of the feature-correlation matrices
// computed over all flattened (window, time) rows; 0 by definition for D = 1.
// Zero-variance features contribute zero correlations; *warnings counts them.
double correlational_score(const Tensor& real_windows, const Tensor& synth_windows,
                           std::size_t* warnings = nullptr);

// |test accuracy - 0.5| of a small classifier trained to separate real from
// synthetic flattened windows (stratified 80/20 split, 200 Adam steps).
double discriminative_score(const Tensor& real_windows, const Tensor& synth_windows, Rng& rng);

// Train-on-synthetic-test-on-real one-step-ahead regression; mean absolute
// error of the final step predicted from the first w-1 steps.
double predictive_score(const Tensor& real_windows, const Tensor& synth_windows, Rng& rng);

}  // namespace tsgdiff
