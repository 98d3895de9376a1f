#include "wshift/kd_tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace wshift {

KdTree::KdTree(std::span<const std::vector<double>> points, std::size_t dim)
    : points_(points), dim_(dim) {
  order_.resize(points.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  nodes_.reserve(points.size() / leaf_size * 2 + 2);
  if (!points.empty()) build(0, points.size());
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t node_index = nodes_.size();
  nodes_.emplace_back();
  if (end - begin <= leaf_size) {
    nodes_[node_index].begin = begin;
    nodes_[node_index].end = end;
    return node_index;
  }

  // Split on the axis with the widest spread.
  std::size_t axis = 0;
  double best_spread = -1.0;
  for (std::size_t a = 0; a < dim_; ++a) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = begin; k < end; ++k) {
      const double v = points_[order_[k]][a];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    if (hi - lo > best_spread) {
      best_spread = hi - lo;
      axis = a;
    }
  }
  if (best_spread <= 0.0) {
    // All points identical in every axis; keep as one leaf.
    nodes_[node_index].begin = begin;
    nodes_[node_index].end = end;
    return node_index;
  }

  const std::size_t mid = (begin + end) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) {
                     return points_[a][axis] < points_[b][axis];
                   });

  nodes_[node_index].axis = axis;
  nodes_[node_index].split = points_[order_[mid]][axis];
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  nodes_[node_index].left = left;
  nodes_[node_index].right = right;
  nodes_[node_index].begin = nodes_[node_index].end = 0;
  return node_index;
}

double KdTree::sq_distance(std::size_t point, std::span<const double> query) const {
  const auto& p = points_[point];
  double acc = 0.0;
  for (std::size_t l = 0; l < dim_; ++l) {
    const double diff = p[l] - query[l];
    acc += diff * diff;
  }
  return acc;
}

void KdTree::search(std::size_t node, std::span<const double> query, double& best_dist,
                    std::size_t& best_index) const {
  const Node& nd = nodes_[node];
  if (nd.left == npos) {
    for (std::size_t k = nd.begin; k < nd.end; ++k) {
      const std::size_t idx = order_[k];
      const double d = sq_distance(idx, query);
      if (d < best_dist || (d == best_dist && idx < best_index)) {
        best_dist = d;
        best_index = idx;
      }
    }
    return;
  }
  const double diff = query[nd.axis] - nd.split;
  const std::size_t near = diff < 0.0 ? nd.left : nd.right;
  const std::size_t far = diff < 0.0 ? nd.right : nd.left;
  search(near, query, best_dist, best_index);
  // Equal bounds must still be searched: an equally distant point with a
  // smaller index may live on the far side.
  if (!(diff * diff > best_dist)) search(far, query, best_dist, best_index);
}

std::size_t KdTree::nearest(std::span<const double> query) const {
  double best_dist = std::numeric_limits<double>::infinity();
  std::size_t best_index = static_cast<std::size_t>(-1);
  search(0, query, best_dist, best_index);
  return best_index;
}

}  // namespace wshift
