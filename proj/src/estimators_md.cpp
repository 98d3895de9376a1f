#include "wshift/estimators_md.hpp"

#include <cmath>

#include "wshift/estimators_cs.hpp"

namespace wshift {

MdWeightVector md_weights(const MissingDataset& md, const IndexedOptions& opts) {
  auto [src, tgt] = split_missing(md);
  MdWeightVector w;
  w.eta_hat = static_cast<double>(src.n()) / static_cast<double>(md.N());
  if (tgt.m() == 0) {
    w.q.assign(src.n(), 0.0);
    return w;
  }
  w.q = nn_weights(nn_assign_indexed(src, tgt, opts), src.n()).p;
  return w;
}

EstimateReport md_w_estimate(const MissingDataset& md, const Functional& g, double level,
                             const IndexedOptions& opts) {
  auto [src, tgt] = split_missing(md);
  const std::size_t n = src.n();
  const std::size_t m = tgt.m();
  const double N = static_cast<double>(md.N());

  Assignment a;
  if (m > 0) a = nn_assign_indexed(src, tgt, opts);

  // Accumulate in original row order; incomplete rows take their nearest
  // complete case's g-value.
  double sum_g = 0.0;
  double sum_g2_complete = 0.0;
  double sum_g2_matched = 0.0;
  std::size_t next_incomplete = 0;
  for (const MissingRow& row : md.rows) {
    if (row.observed()) {
      const double gv = g(row.x, *row.y);
      sum_g += gv;
      sum_g2_complete += gv * gv;
    } else {
      const LabeledSample& s = src.samples[a.nn_index[next_incomplete++]];
      const double gv = g(s.x, s.y);
      sum_g += gv;
      sum_g2_matched += gv * gv;
    }
  }

  const double eta = static_cast<double>(n) / N;
  const double mu = sum_g / N;
  const double mean_g2_complete = sum_g2_complete / static_cast<double>(n);
  const double mean_g2_matched = m > 0 ? sum_g2_matched / static_cast<double>(m) : 0.0;
  const double sigma2 =
      std::max(0.0, eta * mean_g2_complete + (1.0 - eta) * mean_g2_matched - mu * mu);

  EstimateReport report;
  report.method = "w_v";
  report.n = n;
  report.m = m;
  report.level = level;
  report.theta_hat = mu;
  report.sigma2_hat = sigma2;
  report.stderr_hat = std::sqrt(sigma2 / N);
  const double z = wald_z(level);
  report.ci_lower = mu - z * report.stderr_hat;
  report.ci_upper = mu + z * report.stderr_hat;
  return report;
}

namespace {

struct MdFold {
  double mu = 0.0;
  double sigma2 = 0.0;
  std::size_t size = 0;  // N_i = n_i + m_i
};

MdFold md_enhanced_fold(const SourceDataset& src_fold, const TargetDataset& tgt_fold,
                        const Functional& g, const FittedModel& zeta,
                        const IndexedOptions& opts) {
  const double ni = static_cast<double>(src_fold.n());
  const double mi = static_cast<double>(tgt_fold.m());
  const double Ni = ni + mi;

  double sum_g = 0.0;
  double sum_g2 = 0.0;
  for (const auto& s : src_fold.samples) {
    const double gv = g(s.x, s.y);
    sum_g += gv;
    sum_g2 += gv * gv;
  }

  MdFold fold;
  fold.size = src_fold.n() + tgt_fold.m();
  if (tgt_fold.m() == 0) {
    fold.mu = sum_g / Ni;
    fold.sigma2 = std::max(0.0, sum_g2 / Ni - fold.mu * fold.mu);
    return fold;
  }

  const Assignment a = nn_assign_indexed(src_fold, tgt_fold, opts);
  double zeta_target = 0.0;
  for (const auto& xt : tgt_fold.points) zeta_target += predict(zeta, xt);
  double corr = 0.0;
  double sum_g_nn = 0.0;
  double sum_g2_nn = 0.0;
  for (std::size_t j = 0; j < tgt_fold.m(); ++j) {
    const LabeledSample& s = src_fold.samples[a.nn_index[j]];
    const double gv = g(s.x, s.y);
    corr += gv - predict(zeta, s.x);
    sum_g_nn += gv;
    sum_g2_nn += gv * gv;
  }

  fold.mu = sum_g / Ni + zeta_target / Ni + corr / Ni;
  // Plug-in variance of the fold's plain W-estimate.
  const double eta_i = ni / Ni;
  const double mu_plain = (sum_g + sum_g_nn) / Ni;
  fold.sigma2 = std::max(0.0, eta_i * (sum_g2 / ni) + (1.0 - eta_i) * (sum_g2_nn / mi) -
                                  mu_plain * mu_plain);
  return fold;
}

}  // namespace

EstimateReport md_enhanced_w_estimate(const MissingDataset& md, const Functional& g,
                                      const RegressorSpec& regressor, std::uint64_t seed,
                                      double level, const IndexedOptions& opts) {
  auto [src, tgt] = split_missing(md);
  const std::size_t n = src.n();
  const std::size_t m = tgt.m();
  const double N = static_cast<double>(md.N());

  if (m == 0) {
    EstimateReport report = md_w_estimate(md, g, level, opts);
    report.method = "w_s";
    return report;
  }
  if (n < 4 || m < 2)
    throw InsufficientData("split-based estimation needs n >= 4 and m >= 2");

  const SplitPlan plan = make_split_plan(n, m, seed);
  SourceDataset src_fold[2];
  TargetDataset tgt_fold[2];
  FittedModel zeta[2];
  for (int h = 0; h < 2; ++h) {
    src_fold[h].d = src.d;
    for (std::size_t i : plan.source_half[h]) src_fold[h].samples.push_back(src.samples[i]);
    tgt_fold[h].d = tgt.d;
    for (std::size_t j : plan.target_half[h]) tgt_fold[h].points.push_back(tgt.points[j]);

    std::vector<std::vector<double>> X;
    std::vector<double> z;
    for (const auto& s : src_fold[h].samples) {
      X.push_back(s.x);
      z.push_back(g(s.x, s.y));
    }
    try {
      zeta[h] = fit(regressor, X, z);
    } catch (const Error& e) {
      throw RegressionFailure("half " + std::to_string(h + 1) + ": " + e.what());
    }
  }

  double mu = 0.0;
  double sigma2 = 0.0;
  for (int h = 0; h < 2; ++h) {
    const MdFold fold = md_enhanced_fold(src_fold[h], tgt_fold[h], g, zeta[1 - h], opts);
    const double weight = static_cast<double>(fold.size) / N;
    mu += weight * fold.mu;
    sigma2 += weight * fold.sigma2;
  }

  EstimateReport report;
  report.method = "w_s";
  report.n = n;
  report.m = m;
  report.level = level;
  report.theta_hat = mu;
  report.sigma2_hat = sigma2;
  report.stderr_hat = std::sqrt(sigma2 / N);
  const double z = wald_z(level);
  report.ci_lower = mu - z * report.stderr_hat;
  report.ci_upper = mu + z * report.stderr_hat;
  return report;
}

}  // namespace wshift
