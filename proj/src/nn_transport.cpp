#include "wshift/nn_transport.hpp"

#include <limits>

#include "wshift/kd_tree.hpp"

namespace wshift {

DistanceMatrix pairwise_sq_distances(const SourceDataset& src, const TargetDataset& tgt) {
  validate_pair(src, tgt);
  DistanceMatrix dm;
  dm.n = src.n();
  dm.m = tgt.m();
  dm.entries.resize(dm.n * dm.m);
  for (std::size_t i = 0; i < dm.n; ++i) {
    const auto& xi = src.samples[i].x;
    for (std::size_t j = 0; j < dm.m; ++j) {
      const auto& xj = tgt.points[j];
      double acc = 0.0;
      for (std::size_t l = 0; l < src.d; ++l) {
        const double diff = xi[l] - xj[l];
        acc += diff * diff;
      }
      dm.entries[i * dm.m + j] = acc;
    }
  }
  return dm;
}

Assignment nn_assign(const DistanceMatrix& dm) {
  Assignment a;
  a.nn_index.resize(dm.m);
  for (std::size_t j = 0; j < dm.m; ++j) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < dm.n; ++i) {
      const double e = dm.at(i, j);
      if (e < best) {  // strict: ties keep the smallest index
        best = e;
        best_i = i;
      }
    }
    a.nn_index[j] = best_i;
  }
  return a;
}

WeightVector nn_weights(const Assignment& a, std::size_t n) {
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t idx : a.nn_index) {
    if (idx >= n) throw IndexOutOfRange("assignment references source index " + std::to_string(idx));
    ++counts[idx];
  }
  WeightVector w;
  w.p.resize(n);
  const double m = static_cast<double>(a.nn_index.size());
  for (std::size_t i = 0; i < n; ++i) w.p[i] = static_cast<double>(counts[i]) / m;
  return w;
}

Assignment nn_assign_indexed(const SourceDataset& src, const TargetDataset& tgt,
                             const IndexedOptions& opts) {
  validate_pair(src, tgt);
  const std::size_t n = src.n();
  const std::size_t m = tgt.m();
  Assignment a;
  a.nn_index.resize(m);

  if (n * m > opts.pair_threshold && src.d <= opts.max_tree_dim) {
    std::vector<std::vector<double>> pts(n);
    for (std::size_t i = 0; i < n; ++i) pts[i] = src.samples[i].x;
    const KdTree tree(pts, src.d);
    for (std::size_t j = 0; j < m; ++j) a.nn_index[j] = tree.nearest(tgt.points[j]);
    return a;
  }

  // Fused brute force; no n x m matrix is materialized.
  for (std::size_t j = 0; j < m; ++j) {
    const auto& xj = tgt.points[j];
    double best = std::numeric_limits<double>::infinity();
    std::size_t best_i = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& xi = src.samples[i].x;
      double acc = 0.0;
      for (std::size_t l = 0; l < src.d; ++l) {
        const double diff = xi[l] - xj[l];
        acc += diff * diff;
      }
      if (acc < best) {
        best = acc;
        best_i = i;
      }
    }
    a.nn_index[j] = best_i;
  }
  return a;
}

std::vector<double> density_ratio_estimates(const WeightVector& p) {
  std::vector<double> r(p.p.size());
  const double n = static_cast<double>(p.p.size());
  for (std::size_t i = 0; i < p.p.size(); ++i) r[i] = n * p.p[i];
  return r;
}

WeightVector minimum_w_weights(const SourceDataset& src, const TargetDataset& tgt,
                               const IndexedOptions& opts) {
  return nn_weights(nn_assign_indexed(src, tgt, opts), src.n());
}

}  // namespace wshift
