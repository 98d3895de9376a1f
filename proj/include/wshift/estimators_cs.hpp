#pragma once

#include <cstdint>
#include <vector>

#include "wshift/core.hpp"
#include "wshift/nn_transport.hpp"
#include "wshift/regressors.hpp"

namespace wshift {

/// Minimum-W point estimate with plug-in variance and Wald interval: each
/// target point takes the g-value of its nearest source point; theta is the
/// mean of those imputed values, sigma2 the matching second-moment plug-in
/// (floored at zero), and the interval theta +- z * sqrt(sigma2 / m).
EstimateReport w_estimate(const SourceDataset& src, const TargetDataset& tgt,
                          const Functional& g, double level = 0.95,
                          const IndexedOptions& opts = {});

/// Weighted empirical CDF at (x, y) with componentwise <= on covariates.
double cdf_estimate(const SourceDataset& src, const WeightVector& p,
                    std::span<const double> x, double y);

/// Disjoint half-splits of source and target index ranges; when a count is
/// odd the extra element goes to half 1.
struct SplitPlan {
  std::vector<std::size_t> source_half[2];
  std::vector<std::size_t> target_half[2];
  std::uint64_t seed = 0;
};

SplitPlan make_split_plan(std::size_t n, std::size_t m, std::uint64_t seed);

/// Data-splitting enhanced W-estimate: fit the regression of g(X, Y) on X in
/// each source half, cross-apply it to the other half's fold, correct with
/// that fold's own minimum-W weights, and combine the two fold estimates with
/// weights (n_i + m_i) / (n + m). The variance is the per-fold plug-in
/// combined with the same weights; the interval scales by sqrt(m).
EstimateReport enhanced_w_estimate(const SourceDataset& src, const TargetDataset& tgt,
                                   const Functional& g, const RegressorSpec& regressor,
                                   std::uint64_t seed, double level = 0.95,
                                   const IndexedOptions& opts = {});

/// z-quantile for a two-sided interval at the given level.
double wald_z(double level);

}  // namespace wshift
