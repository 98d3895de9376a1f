#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "wshift/core.hpp"
#include "wshift/nn_transport.hpp"

namespace wshift {

/// Coupling with column sums 1/m; rows marginalize to the weight vector.
struct TransportPlan {
  std::vector<double> pi;  // row-major, n x m
  std::size_t n = 0;
  std::size_t m = 0;

  double at(std::size_t i, std::size_t j) const { return pi[i * m + j]; }
  std::vector<double> row_marginal() const;
};

struct OracleReport {
  double objective = 0.0;  // minimal W2^2 value
  TransportPlan plan;
  WeightVector p_star;
  bool matched_closed_form = false;
  double gap = 0.0;  // |closed-form objective - brute-force objective|
};

/// Exhaustively enumerates every column assignment j -> i (the vertices of
/// the column-constrained polytope) and returns the minimal
/// sum_j (1/m) e_ij^2 objective together with the induced weights.
/// Guard: n^m <= 10^6.
OracleReport min_over_p_bruteforce(const SourceDataset& src, const TargetDataset& tgt);

/// Exact transportation problem with fixed marginals: rows p, columns 1/m,
/// costs the squared distances. Returns (W2^2, optimal plan). Solved by the
/// transportation simplex (northwest-corner start, MODI pivoting).
/// Guards: n*m <= 400; marginal sums must agree within 1e-9.
std::pair<double, TransportPlan> w2_fixed_marginals(const SourceDataset& src,
                                                    const WeightVector& p,
                                                    const TargetDataset& tgt);

/// q-Wasserstein distance between two weighted 1-D samples via the monotone
/// quantile coupling; returns W_q (already rooted).
double wq_1d_closed_form(const std::vector<double>& points_a,
                         const std::vector<double>& weights_a,
                         const std::vector<double>& points_b,
                         const std::vector<double>& weights_b, double q);

/// Computes the closed-form weights, their exact transport objective, and the
/// brute-force optimum; flags whether they match (absolute tolerance 1e-10 on
/// costs normalized by the largest cost entry). On tie-free instances the
/// weights themselves are compared elementwise as well.
OracleReport verify_theorem1(const SourceDataset& src, const TargetDataset& tgt);

}  // namespace wshift
