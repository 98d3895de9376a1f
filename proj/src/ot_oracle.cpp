#include "wshift/ot_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wshift {

std::vector<double> TransportPlan::row_marginal() const {
  std::vector<double> p(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < m; ++j) p[i] += at(i, j);
  return p;
}

namespace {

double max_entry(const DistanceMatrix& dm) {
  double mx = 0.0;
  for (double e : dm.entries) mx = std::max(mx, e);
  return mx;
}

double objective_tolerance(const DistanceMatrix& dm) {
  return 1e-10 * std::max(1.0, max_entry(dm));
}

}  // namespace

OracleReport min_over_p_bruteforce(const SourceDataset& src, const TargetDataset& tgt) {
  const DistanceMatrix dm = pairwise_sq_distances(src, tgt);
  const std::size_t n = dm.n;
  const std::size_t m = dm.m;

  double combos = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    combos *= static_cast<double>(n);
    if (combos > 1e6)
      throw InstanceTooLarge("n^m exceeds the brute-force guard of 1e6 assignments");
  }

  std::vector<std::size_t> assign(m, 0);
  std::vector<std::size_t> best_assign(m, 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    double cost = 0.0;
    for (std::size_t j = 0; j < m; ++j) cost += dm.at(assign[j], j);
    cost /= static_cast<double>(m);
    if (cost < best) {
      best = cost;
      best_assign = assign;
    }
    // Mixed-radix increment over [0, n)^m.
    std::size_t j = 0;
    while (j < m && ++assign[j] == n) {
      assign[j] = 0;
      ++j;
    }
    if (j == m) break;
  }

  OracleReport report;
  report.objective = best;
  report.plan.n = n;
  report.plan.m = m;
  report.plan.pi.assign(n * m, 0.0);
  std::vector<std::size_t> counts(n, 0);
  for (std::size_t j = 0; j < m; ++j) {
    report.plan.pi[best_assign[j] * m + j] = 1.0 / static_cast<double>(m);
    ++counts[best_assign[j]];
  }
  report.p_star.p.resize(n);
  for (std::size_t i = 0; i < n; ++i)
    report.p_star.p[i] = static_cast<double>(counts[i]) / static_cast<double>(m);

  // Closed-form objective: each column pays its minimal cost.
  double closed = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    double mn = dm.at(0, j);
    for (std::size_t i = 1; i < n; ++i) mn = std::min(mn, dm.at(i, j));
    closed += mn;
  }
  closed /= static_cast<double>(m);
  report.gap = std::abs(closed - best);
  report.matched_closed_form = report.gap <= objective_tolerance(dm);
  return report;
}

namespace {

// Transportation simplex state: basis cells form a spanning tree on the
// bipartite (row, column) node set.
struct Simplex {
  std::size_t n, m;
  const std::vector<double>& cost;  // n x m
  std::vector<double> flow;
  std::vector<char> basic;

  Simplex(std::size_t n_, std::size_t m_, const std::vector<double>& c)
      : n(n_), m(m_), cost(c), flow(n * m, 0.0), basic(n * m, 0) {}

  double& f(std::size_t i, std::size_t j) { return flow[i * m + j]; }
  bool is_basic(std::size_t i, std::size_t j) const { return basic[i * m + j] != 0; }

  void northwest_corner(std::vector<double> supply, std::vector<double> demand) {
    std::size_t i = 0, j = 0;
    std::size_t placed = 0;
    while (placed < n + m - 1) {
      const double t = std::min(supply[i], demand[j]);
      f(i, j) = t;
      basic[i * m + j] = 1;
      ++placed;
      supply[i] -= t;
      demand[j] -= t;
      if (supply[i] < 0) supply[i] = 0;
      if (demand[j] < 0) demand[j] = 0;
      // Advance along the exhausted side; on simultaneous exhaustion keep a
      // degenerate zero so the basis stays a spanning tree.
      if (i + 1 == n)
        ++j;
      else if (j + 1 == m)
        ++i;
      else if (supply[i] <= demand[j])
        ++i;
      else
        ++j;
    }
  }

  // Potentials from the basis tree: u[i] + v[j] = cost[i][j] on basic cells.
  void potentials(std::vector<double>& u, std::vector<double>& v) const {
    u.assign(n, std::numeric_limits<double>::quiet_NaN());
    v.assign(m, std::numeric_limits<double>::quiet_NaN());
    u[0] = 0.0;
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          if (!is_basic(i, j)) continue;
          if (!std::isnan(u[i]) && std::isnan(v[j])) {
            v[j] = cost[i * m + j] - u[i];
            progress = true;
          } else if (std::isnan(u[i]) && !std::isnan(v[j])) {
            u[i] = cost[i * m + j] - v[j];
            progress = true;
          }
        }
    }
  }

  // Cycle through the basis tree from (ei, ej) back to itself. Returns the
  // cells in order, alternating +,-,+,-,... starting at the entering cell.
  std::vector<std::pair<std::size_t, std::size_t>> find_cycle(std::size_t ei,
                                                              std::size_t ej) const {
    // Nodes: rows 0..n-1, columns n..n+m-1. Parent BFS over basic cells from
    // row node ei to column node n+ej, then read the path back.
    const std::size_t total = n + m;
    std::vector<std::size_t> parent(total, static_cast<std::size_t>(-1));
    std::vector<char> seen(total, 0);
    std::vector<std::size_t> queue{ei};
    seen[ei] = 1;
    for (std::size_t qa = 0; qa < queue.size(); ++qa) {
      const std::size_t node = queue[qa];
      if (node == n + ej) break;
      if (node < n) {
        for (std::size_t j = 0; j < m; ++j)
          if (is_basic(node, j) && !seen[n + j]) {
            seen[n + j] = 1;
            parent[n + j] = node;
            queue.push_back(n + j);
          }
      } else {
        const std::size_t j = node - n;
        for (std::size_t i = 0; i < n; ++i)
          if (is_basic(i, j) && !seen[i]) {
            seen[i] = 1;
            parent[i] = node;
            queue.push_back(i);
          }
      }
    }

    std::vector<std::size_t> path;  // node sequence from column n+ej back to row ei
    for (std::size_t node = n + ej; node != static_cast<std::size_t>(-1); node = parent[node])
      path.push_back(node);
    // path = [n+ej, ..., ei]; prepend the entering arc by walking pairs.
    std::vector<std::pair<std::size_t, std::size_t>> cycle;
    cycle.emplace_back(ei, ej);
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      const std::size_t a = path[k];
      const std::size_t b = path[k + 1];
      if (a >= n)
        cycle.emplace_back(b, a - n);  // row b, column a-n
      else
        cycle.emplace_back(a, b - n);
    }
    return cycle;
  }

  void pivot(std::size_t ei, std::size_t ej) {
    const auto cycle = find_cycle(ei, ej);
    // Odd positions (1, 3, ...) lose flow.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leave = 1;
    for (std::size_t k = 1; k < cycle.size(); k += 2) {
      const double fl = f(cycle[k].first, cycle[k].second);
      if (fl < theta) {
        theta = fl;
        leave = k;
      }
    }
    for (std::size_t k = 0; k < cycle.size(); ++k) {
      double& fl = f(cycle[k].first, cycle[k].second);
      fl += (k % 2 == 0 ? theta : -theta);
      if (fl < 0) fl = 0;
    }
    basic[cycle[leave].first * m + cycle[leave].second] = 0;
    basic[ei * m + ej] = 1;
  }

  void solve() {
    std::vector<double> u, v;
    const double cmax = *std::max_element(cost.begin(), cost.end());
    const double tol = 1e-12 * std::max(1.0, cmax);
    const std::size_t max_pivots = 50 * (n + m) * (n + m) + 100;
    for (std::size_t it = 0; it < max_pivots; ++it) {
      potentials(u, v);
      double best = -tol;
      std::size_t ei = 0, ej = 0;
      bool found = false;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          if (is_basic(i, j)) continue;
          const double reduced = cost[i * m + j] - u[i] - v[j];
          if (reduced < best) {
            best = reduced;
            ei = i;
            ej = j;
            found = true;
          }
        }
      if (!found) return;
      pivot(ei, ej);
    }
    throw Error("transportation simplex failed to converge");
  }
};

}  // namespace

std::pair<double, TransportPlan> w2_fixed_marginals(const SourceDataset& src,
                                                    const WeightVector& p,
                                                    const TargetDataset& tgt) {
  const DistanceMatrix dm = pairwise_sq_distances(src, tgt);
  const std::size_t n = dm.n;
  const std::size_t m = dm.m;
  if (n * m > 400) throw InstanceTooLarge("fixed-marginal solver guard: n*m must be <= 400");
  if (p.p.size() != n) throw DimensionMismatch("weight vector length != source size");

  std::vector<double> supply = p.p;
  std::vector<double> demand(m, 1.0 / static_cast<double>(m));
  double ssum = std::accumulate(supply.begin(), supply.end(), 0.0);
  double dsum = std::accumulate(demand.begin(), demand.end(), 0.0);
  if (std::abs(ssum - dsum) > 1e-9)
    throw InfeasibleMarginals("marginal sums differ by more than 1e-9");
  for (double s : supply)
    if (s < 0) throw InfeasibleMarginals("negative supply entry");
  // Force exact balance so the northwest-corner pass terminates cleanly.
  demand[m - 1] += ssum - dsum;

  Simplex sx(n, m, dm.entries);
  sx.northwest_corner(supply, demand);
  sx.solve();

  TransportPlan plan;
  plan.n = n;
  plan.m = m;
  plan.pi = sx.flow;
  double objective = 0.0;
  for (std::size_t k = 0; k < n * m; ++k) objective += plan.pi[k] * dm.entries[k];
  return {objective, std::move(plan)};
}

double wq_1d_closed_form(const std::vector<double>& points_a,
                         const std::vector<double>& weights_a,
                         const std::vector<double>& points_b,
                         const std::vector<double>& weights_b, double q) {
  if (points_a.size() != weights_a.size() || points_b.size() != weights_b.size())
    throw DimensionMismatch("points/weights length mismatch");
  if (points_a.empty() || points_b.empty()) throw EmptyDataset("empty 1-D sample");
  if (q < 1.0) throw ConfigError("wq_1d_closed_form requires q >= 1");

  auto sorted_order = [](const std::vector<double>& pts) {
    std::vector<std::size_t> idx(pts.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return pts[a] < pts[b]; });
    return idx;
  };
  const auto ia = sorted_order(points_a);
  const auto ib = sorted_order(points_b);

  // Walk the merged quantile grid of the two inverse CDFs.
  double cost = 0.0;
  std::size_t a = 0, b = 0;
  double ra = weights_a[ia[0]];
  double rb = weights_b[ib[0]];
  while (a < ia.size() && b < ib.size()) {
    const double step = std::min(ra, rb);
    if (step > 0.0) cost += step * std::pow(std::abs(points_a[ia[a]] - points_b[ib[b]]), q);
    ra -= step;
    rb -= step;
    if (ra <= 1e-15 && a + 1 <= ia.size()) {
      ++a;
      if (a < ia.size()) ra = weights_a[ia[a]];
    }
    if (rb <= 1e-15 && b + 1 <= ib.size()) {
      ++b;
      if (b < ib.size()) rb = weights_b[ib[b]];
    }
  }
  return std::pow(cost, 1.0 / q);
}

OracleReport verify_theorem1(const SourceDataset& src, const TargetDataset& tgt) {
  const DistanceMatrix dm = pairwise_sq_distances(src, tgt);
  const WeightVector p_hat = nn_weights(nn_assign(dm), dm.n);
  const auto [closed_objective, closed_plan] = w2_fixed_marginals(src, p_hat, tgt);
  OracleReport brute = min_over_p_bruteforce(src, tgt);

  OracleReport report;
  report.objective = brute.objective;
  report.plan = closed_plan;
  report.p_star = brute.p_star;
  report.gap = std::abs(closed_objective - brute.objective);
  report.matched_closed_form = report.gap <= objective_tolerance(dm);

  // Tie-free instance: the weights must agree elementwise too.
  bool tie_free = true;
  for (std::size_t j = 0; j < dm.m && tie_free; ++j) {
    double mn = dm.at(0, j);
    std::size_t hits = 1;
    for (std::size_t i = 1; i < dm.n; ++i) {
      if (dm.at(i, j) < mn) {
        mn = dm.at(i, j);
        hits = 1;
      } else if (dm.at(i, j) == mn) {
        ++hits;
      }
    }
    if (hits > 1) tie_free = false;
  }
  if (tie_free) {
    for (std::size_t i = 0; i < dm.n; ++i)
      if (std::abs(p_hat.p[i] - brute.p_star.p[i]) > 1e-10) {
        report.matched_closed_form = false;
        break;
      }
  }
  return report;
}

}  // namespace wshift
