#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wshift {

/// Static kd-tree over a fixed point set for exact 1-nearest-neighbor
/// queries. Matches the brute-force scan bit-for-bit: candidate distances are
/// accumulated in ascending coordinate order, a candidate replaces the
/// incumbent only if strictly closer or equally close with a smaller index,
/// and subtrees are pruned only when the splitting-plane bound strictly
/// exceeds the incumbent distance (equal bounds are searched so equal-distance
/// smaller indices are never lost).
class KdTree {
 public:
  KdTree(std::span<const std::vector<double>> points, std::size_t dim);

  /// Returns the index of the nearest point (smallest index on ties).
  std::size_t nearest(std::span<const double> query) const;

 private:
  struct Node {
    std::size_t axis = 0;
    double split = 0.0;
    std::size_t left = npos;   // node index
    std::size_t right = npos;  // node index
    std::size_t begin = 0;     // leaf payload range in order_
    std::size_t end = 0;
  };

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);
  static constexpr std::size_t leaf_size = 16;

  std::size_t build(std::size_t begin, std::size_t end);
  void search(std::size_t node, std::span<const double> query, double& best_dist,
              std::size_t& best_index) const;
  double sq_distance(std::size_t point, std::span<const double> query) const;

  std::span<const std::vector<double>> points_;
  std::size_t dim_;
  std::vector<std::size_t> order_;  // point indices, permuted by build
  std::vector<Node> nodes_;
};

}  // namespace wshift
