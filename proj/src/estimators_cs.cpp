#include "wshift/estimators_cs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wshift/rng.hpp"
#include "wshift/stats.hpp"

namespace wshift {

double wald_z(double level) {
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("confidence level must be in (0,1)");
  return normal_quantile(0.5 * (1.0 + level));
}

EstimateReport w_estimate(const SourceDataset& src, const TargetDataset& tgt,
                          const Functional& g, double level, const IndexedOptions& opts) {
  const Assignment a = nn_assign_indexed(src, tgt, opts);
  const std::size_t m = tgt.m();

  double sum_g = 0.0;
  double sum_g2 = 0.0;
  for (std::size_t j = 0; j < m; ++j) {
    const LabeledSample& s = src.samples[a.nn_index[j]];
    const double gv = g(s.x, s.y);
    sum_g += gv;
    sum_g2 += gv * gv;
  }
  const double md = static_cast<double>(m);

  EstimateReport report;
  report.method = "w_v";
  report.n = src.n();
  report.m = m;
  report.level = level;
  report.theta_hat = sum_g / md;
  report.sigma2_hat = std::max(0.0, sum_g2 / md - report.theta_hat * report.theta_hat);
  report.stderr_hat = std::sqrt(report.sigma2_hat / md);
  const double z = wald_z(level);
  report.ci_lower = report.theta_hat - z * report.stderr_hat;
  report.ci_upper = report.theta_hat + z * report.stderr_hat;
  return report;
}

double cdf_estimate(const SourceDataset& src, const WeightVector& p,
                    std::span<const double> x, double y) {
  if (p.p.size() != src.n()) throw DimensionMismatch("weight vector length != source size");
  if (x.size() != src.d) throw DimensionMismatch("query dimension != source dimension");
  double acc = 0.0;
  for (std::size_t i = 0; i < src.n(); ++i) {
    const LabeledSample& s = src.samples[i];
    if (s.y > y) continue;
    bool dominated = true;
    for (std::size_t l = 0; l < x.size(); ++l)
      if (s.x[l] > x[l]) {
        dominated = false;
        break;
      }
    if (dominated) acc += p.p[i];
  }
  return acc;
}

SplitPlan make_split_plan(std::size_t n, std::size_t m, std::uint64_t seed) {
  SplitPlan plan;
  plan.seed = seed;
  auto split = [](std::size_t count, Rng& rng, std::vector<std::size_t>* halves) {
    std::vector<std::size_t> idx(count);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    rng.shuffle(idx);
    const std::size_t first = (count + 1) / 2;  // odd counts favor half 1
    halves[0].assign(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(first));
    halves[1].assign(idx.begin() + static_cast<std::ptrdiff_t>(first), idx.end());
  };
  Rng src_rng(mix64(seed, 1));
  Rng tgt_rng(mix64(seed, 2));
  split(n, src_rng, plan.source_half);
  split(m, tgt_rng, plan.target_half);
  return plan;
}

namespace {

SourceDataset subset_source(const SourceDataset& src, const std::vector<std::size_t>& idx) {
  SourceDataset out;
  out.d = src.d;
  out.samples.reserve(idx.size());
  for (std::size_t i : idx) out.samples.push_back(src.samples[i]);
  return out;
}

TargetDataset subset_target(const TargetDataset& tgt, const std::vector<std::size_t>& idx) {
  TargetDataset out;
  out.d = tgt.d;
  out.points.reserve(idx.size());
  for (std::size_t j : idx) out.points.push_back(tgt.points[j]);
  return out;
}

struct FoldEstimate {
  double theta = 0.0;
  double sigma2 = 0.0;
};

// One Algorithm-1 fold: weights from (source fold, target fold), regression
// from the other source half.
FoldEstimate enhanced_fold(const SourceDataset& src_fold, const TargetDataset& tgt_fold,
                           const Functional& g, const FittedModel& zeta,
                           const IndexedOptions& opts) {
  const Assignment a = nn_assign_indexed(src_fold, tgt_fold, opts);
  const double m = static_cast<double>(tgt_fold.m());

  double zeta_target = 0.0;
  for (const auto& xt : tgt_fold.points) zeta_target += predict(zeta, xt);

  double corr = 0.0;
  double sum_g = 0.0;
  double sum_g2 = 0.0;
  for (std::size_t j = 0; j < tgt_fold.m(); ++j) {
    const LabeledSample& s = src_fold.samples[a.nn_index[j]];
    const double gv = g(s.x, s.y);
    corr += gv - predict(zeta, s.x);
    sum_g += gv;
    sum_g2 += gv * gv;
  }

  FoldEstimate fold;
  fold.theta = zeta_target / m + corr / m;
  const double mean_g = sum_g / m;
  fold.sigma2 = std::max(0.0, sum_g2 / m - mean_g * mean_g);
  return fold;
}

}  // namespace

EstimateReport enhanced_w_estimate(const SourceDataset& src, const TargetDataset& tgt,
                                   const Functional& g, const RegressorSpec& regressor,
                                   std::uint64_t seed, double level,
                                   const IndexedOptions& opts) {
  validate_pair(src, tgt);
  const std::size_t n = src.n();
  const std::size_t m = tgt.m();
  if (n < 4 || m < 4)
    throw InsufficientData("enhanced estimation needs n >= 4 and m >= 4");

  const SplitPlan plan = make_split_plan(n, m, seed);
  SourceDataset src_fold[2];
  TargetDataset tgt_fold[2];
  FittedModel zeta[2];
  for (int h = 0; h < 2; ++h) {
    src_fold[h] = subset_source(src, plan.source_half[h]);
    tgt_fold[h] = subset_target(tgt, plan.target_half[h]);
    std::vector<std::vector<double>> X;
    std::vector<double> z;
    X.reserve(src_fold[h].n());
    z.reserve(src_fold[h].n());
    for (const auto& s : src_fold[h].samples) {
      X.push_back(s.x);
      z.push_back(g(s.x, s.y));  // the regression response is g(X, Y)
    }
    try {
      zeta[h] = fit(regressor, X, z);
    } catch (const Error& e) {
      throw RegressionFailure("half " + std::to_string(h + 1) + ": " + e.what());
    }
  }

  double theta = 0.0;
  double sigma2 = 0.0;
  const double total = static_cast<double>(n + m);
  for (int h = 0; h < 2; ++h) {
    const FoldEstimate fold = enhanced_fold(src_fold[h], tgt_fold[h], g, zeta[1 - h], opts);
    const double weight =
        (static_cast<double>(src_fold[h].n()) + static_cast<double>(tgt_fold[h].m())) / total;
    theta += weight * fold.theta;
    sigma2 += weight * fold.sigma2;
  }

  EstimateReport report;
  report.method = "w_e";
  report.n = n;
  report.m = m;
  report.level = level;
  report.theta_hat = theta;
  report.sigma2_hat = sigma2;
  report.stderr_hat = std::sqrt(sigma2 / static_cast<double>(m));
  const double z = wald_z(level);
  report.ci_lower = theta - z * report.stderr_hat;
  report.ci_upper = theta + z * report.stderr_hat;
  return report;
}

}  // namespace wshift
