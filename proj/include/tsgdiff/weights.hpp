#pragma once

#include <string>

#include "tsgdiff/model.hpp"

namespace tsgdiff {

// Binary model snapshot: magic "TSGD", version 1, explicit little-endian
// payload, the architecture config and its digest, normalization parameters
// and feature names, then one record per tensor/counter of the model state
// (Adam moments included, so training can resume). save -> load -> save is
// byte-identical.
void save_weights(ModelState& model, const std::string& path);
ModelState load_weights(const std::string& path);

}  // namespace tsgdiff
