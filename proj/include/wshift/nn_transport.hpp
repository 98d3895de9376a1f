#pragma once

#include <cstddef>
#include <vector>

#include "wshift/core.hpp"

namespace wshift {

/// Squared-L2 distances between every source row and target column.
/// Squared values are stored throughout: the argmin (and hence the minimum-W
/// weights) is invariant under the monotone square map, and avoiding sqrt
/// keeps the two nearest-neighbor paths bit-comparable.
struct DistanceMatrix {
  std::vector<double> entries;  // row-major, n x m
  std::size_t n = 0;
  std::size_t m = 0;

  double at(std::size_t i, std::size_t j) const { return entries[i * m + j]; }
};

/// nn_index[j] is the 0-based source index nearest to target j; ties resolve
/// to the smallest index.
struct Assignment {
  std::vector<std::size_t> nn_index;
};

/// Simplex weights over source indices; every entry is an integer multiple
/// of 1/m.
struct WeightVector {
  std::vector<double> p;
};

struct IndexedOptions {
  /// Use the spatial tree when n*m exceeds this and d <= max_tree_dim.
  std::size_t pair_threshold = 1'000'000;
  std::size_t max_tree_dim = 16;
};

/// entries[i][j] = sum_l (x_il - xt_jl)^2, accumulated in ascending
/// coordinate order (both nearest-neighbor paths use this exact order).
DistanceMatrix pairwise_sq_distances(const SourceDataset& src, const TargetDataset& tgt);

/// Column argmins with smallest-index tie rule.
Assignment nn_assign(const DistanceMatrix& dm);

/// p_i = #{j : nn_index[j] == i} / m.
WeightVector nn_weights(const Assignment& a, std::size_t n);

/// Same output as nn_assign(pairwise_sq_distances(src, tgt)) - bit-identical
/// indices including the tie rule - choosing between a fused brute-force scan
/// and a kd-tree over the source points based on instance size.
Assignment nn_assign_indexed(const SourceDataset& src, const TargetDataset& tgt,
                             const IndexedOptions& opts = {});

/// Density-ratio estimates at the source points: r(X_i) estimated by n * p_i.
std::vector<double> density_ratio_estimates(const WeightVector& p);

/// Convenience: minimum-W weights for a validated pair.
WeightVector minimum_w_weights(const SourceDataset& src, const TargetDataset& tgt,
                               const IndexedOptions& opts = {});

}  // namespace wshift
