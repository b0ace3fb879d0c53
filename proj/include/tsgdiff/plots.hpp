#pragma once

#include <string>

#include "tsgdiff/tensor.hpp"

namespace tsgdiff {

// Gaussian kernel density over all flattened values of each dataset with
// Silverman bandwidth, evaluated on a shared 256-point grid covering the
// joint range (padded by three bandwidths so each curve integrates to one).
// Returns CSV "x,density_real,density_synth".
std::string kde_csv(const Tensor& real_windows, const Tensor& synth_windows);

// Two-component PCA of flattened windows; components are fitted on the real
// set and applied to both. Returns CSV "pc1,pc2,label".
std::string pca_csv(const Tensor& real_windows, const Tensor& synth_windows);

// Writes kde.csv and pca.csv under out_dir.
void export_plot_data(const Tensor& real_windows, const Tensor& synth_windows,
                      const std::string& out_dir);

}  // namespace tsgdiff
