#pragma once

#include <cstdint>

#include "wshift/core.hpp"
#include "wshift/nn_transport.hpp"
#include "wshift/regressors.hpp"

namespace wshift {

/// Minimum-W weights over complete cases plus the observed fraction.
struct MdWeightVector {
  std::vector<double> q;  // indexed by complete-case position
  double eta_hat = 1.0;   // n / N
};

MdWeightVector md_weights(const MissingDataset& md, const IndexedOptions& opts = {});

/// W-estimate of E[g(X, Y)] under missingness: complete cases enter directly,
/// each incomplete row takes the g-value of its nearest complete case, and
/// the mean is over all N rows in original order. Variance is the plug-in
/// eta * E0_hat[g^2] + (1 - eta) * E1_hat[g^2] - mu^2, interval scaled by
/// sqrt(N).
EstimateReport md_w_estimate(const MissingDataset& md, const Functional& g,
                             double level = 0.95, const IndexedOptions& opts = {});

/// Data-splitting enhanced estimate: complete and incomplete index sets are
/// halved, the regression of g on X is cross-fitted across complete halves,
/// and the two per-half estimates combine with weights N_i / N.
EstimateReport md_enhanced_w_estimate(const MissingDataset& md, const Functional& g,
                                      const RegressorSpec& regressor, std::uint64_t seed,
                                      double level = 0.95, const IndexedOptions& opts = {});

}  // namespace wshift
