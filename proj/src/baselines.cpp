#include "wshift/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "wshift/rng.hpp"

namespace wshift {

namespace {

double sq_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t l = 0; l < a.size(); ++l) {
    const double diff = a[l] - b[l];
    acc += diff * diff;
  }
  return acc;
}

double gaussian_kernel(std::span<const double> x, std::span<const double> c, double h) {
  return std::exp(-sq_distance(x, c) / (2.0 * h * h));
}

// Median pairwise distance over the pooled covariates; pools larger than
// 1024 points are reduced by a seeded subsample so the cost stays bounded.
double median_pairwise_distance(const SourceDataset& src, const TargetDataset& tgt,
                                std::uint64_t seed) {
  std::vector<const std::vector<double>*> pool;
  pool.reserve(src.n() + tgt.m());
  for (const auto& s : src.samples) pool.push_back(&s.x);
  for (const auto& p : tgt.points) pool.push_back(&p);
  constexpr std::size_t cap = 1024;
  if (pool.size() > cap) {
    Rng rng(mix64(seed, 0x6d656469616eULL));
    for (std::size_t i = 0; i < cap; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(cap);
  }
  std::vector<double> dists;
  dists.reserve(pool.size() * (pool.size() - 1) / 2);
  for (std::size_t i = 0; i < pool.size(); ++i)
    for (std::size_t j = i + 1; j < pool.size(); ++j)
      dists.push_back(std::sqrt(sq_distance(*pool[i], *pool[j])));
  if (dists.empty()) return 0.0;
  const std::size_t mid = dists.size() / 2;
  std::nth_element(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(mid), dists.end());
  return dists[mid];
}

}  // namespace

double ratio_at(const RatioModel& model, std::span<const double> x) {
  double r;
  if (model.kind == RatioKind::kliep) {
    r = 0.0;
    for (std::size_t l = 0; l < model.centers.size(); ++l)
      r += model.alpha[l] * gaussian_kernel(x, model.centers[l], model.bandwidth);
  } else {
    const double s = predict_prob(model.classifier, x);
    r = model.scale * s / std::max(1.0 - s, 1e-12);
  }
  return std::clamp(r, 0.0, model.clip_max);
}

double naive_estimate(const SourceDataset& src, const Functional& g) {
  if (src.samples.empty()) throw EmptyDataset("naive estimate of an empty source");
  double acc = 0.0;
  for (const auto& s : src.samples) acc += g(s.x, s.y);
  return acc / static_cast<double>(src.n());
}

double pl_estimate(const SourceDataset& src, const TargetDataset& tgt, const Functional& g,
                   const RegressorSpec& spec) {
  validate_pair(src, tgt);
  std::vector<std::vector<double>> X;
  std::vector<double> z;
  X.reserve(src.n());
  z.reserve(src.n());
  for (const auto& s : src.samples) {
    X.push_back(s.x);
    z.push_back(g(s.x, s.y));
  }
  FittedModel model;
  try {
    model = fit(spec, X, z);
  } catch (const Error& e) {
    throw RegressionFailure(e.what());
  }
  double acc = 0.0;
  for (const auto& p : tgt.points) acc += predict(model, p);
  return acc / static_cast<double>(tgt.m());
}

RatioModel fit_ratio_kliep(const SourceDataset& src, const TargetDataset& tgt,
                           const KliepConfig& config) {
  validate_pair(src, tgt);
  const std::size_t n = src.n();
  const std::size_t m = tgt.m();
  if (n < 2 || m < 2) throw InsufficientData("KLIEP needs n >= 2 and m >= 2");

  RatioModel model;
  model.kind = RatioKind::kliep;
  model.clip_max = config.clip_max;
  model.bandwidth = median_pairwise_distance(src, tgt, config.seed);
  if (model.bandwidth <= 0.0)
    throw DegenerateKernel("median pairwise distance is zero (all points identical)");

  // Seeded sample of target points as kernel centers.
  const std::size_t b = std::min(config.max_centers, m);
  std::vector<std::size_t> idx(m);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  Rng rng(mix64(config.seed, 0x6b6c696570ULL));
  for (std::size_t i = 0; i < b; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.below(m - i));
    std::swap(idx[i], idx[j]);
  }
  model.centers.reserve(b);
  for (std::size_t l = 0; l < b; ++l) model.centers.push_back(tgt.points[idx[l]]);

  // Kernel matrix at the target points and the source-mean kernel vector.
  std::vector<double> Kt(m * b);
  for (std::size_t j = 0; j < m; ++j)
    for (std::size_t l = 0; l < b; ++l)
      Kt[j * b + l] = gaussian_kernel(tgt.points[j], model.centers[l], model.bandwidth);
  std::vector<double> ks(b, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t l = 0; l < b; ++l)
      ks[l] += gaussian_kernel(src.samples[i].x, model.centers[l], model.bandwidth);
  for (std::size_t l = 0; l < b; ++l) ks[l] /= static_cast<double>(n);

  auto project = [&](std::vector<double>& alpha) {
    // Shift onto the source-mean-one hyperplane, clip to the nonnegative
    // orthant, rescale onto the constraint.
    double dot = 0.0, norm2 = 0.0;
    for (std::size_t l = 0; l < b; ++l) {
      dot += ks[l] * alpha[l];
      norm2 += ks[l] * ks[l];
    }
    for (std::size_t l = 0; l < b; ++l) alpha[l] += (1.0 - dot) * ks[l] / norm2;
    for (double& a : alpha) a = std::max(a, 0.0);
    dot = 0.0;
    for (std::size_t l = 0; l < b; ++l) dot += ks[l] * alpha[l];
    if (dot <= 0.0) throw DegenerateKernel("KLIEP projection collapsed to zero");
    for (double& a : alpha) a /= dot;
  };
  auto objective = [&](const std::vector<double>& alpha) {
    double obj = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      double r = 0.0;
      for (std::size_t l = 0; l < b; ++l) r += Kt[j * b + l] * alpha[l];
      if (r <= 0.0) return -std::numeric_limits<double>::infinity();
      obj += std::log(r);
    }
    return obj;
  };

  std::vector<double> alpha(b, 1.0);
  project(alpha);
  double obj = objective(alpha);
  double step = 1.0;
  std::vector<double> grad(b), candidate(b);
  for (std::size_t it = 0; it < config.max_iter; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (std::size_t j = 0; j < m; ++j) {
      double r = 0.0;
      for (std::size_t l = 0; l < b; ++l) r += Kt[j * b + l] * alpha[l];
      for (std::size_t l = 0; l < b; ++l) grad[l] += Kt[j * b + l] / r;
    }
    bool improved = false;
    for (int back = 0; back < 20; ++back) {
      for (std::size_t l = 0; l < b; ++l)
        candidate[l] = alpha[l] + step * grad[l] / static_cast<double>(m);
      project(candidate);
      const double cand_obj = objective(candidate);
      if (cand_obj > obj) {
        improved = cand_obj - obj > config.objective_tol;
        alpha = candidate;
        obj = cand_obj;
        step *= 1.5;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  project(alpha);
  model.alpha = std::move(alpha);
  return model;
}

RatioModel fit_ratio_discriminative(const SourceDataset& src, const TargetDataset& tgt,
                                    const DiscriminativeConfig& config) {
  validate_pair(src, tgt);
  if (src.n() < 2 || tgt.m() < 2)
    throw InsufficientData("discriminative ratio needs n >= 2 and m >= 2");
  std::vector<std::vector<double>> X;
  std::vector<int> labels;
  X.reserve(src.n() + tgt.m());
  for (const auto& s : src.samples) {
    X.push_back(s.x);
    labels.push_back(0);
  }
  for (const auto& p : tgt.points) {
    X.push_back(p);
    labels.push_back(1);
  }
  RatioModel model;
  model.kind = RatioKind::discriminative;
  model.clip_max = config.clip_max;
  model.scale = static_cast<double>(src.n()) / static_cast<double>(tgt.m());
  model.classifier = fit_logistic(X, labels, config.logistic);
  return model;
}

double iw_estimate(const SourceDataset& src, const Functional& g, const RatioModel& ratio,
                   bool hajek) {
  if (src.samples.empty()) throw EmptyDataset("importance-weighted estimate of an empty source");
  double acc = 0.0;
  double wsum = 0.0;
  for (const auto& s : src.samples) {
    const double w = ratio_at(ratio, s.x);
    acc += w * g(s.x, s.y);
    wsum += w;
  }
  if (hajek) return wsum > 0.0 ? acc / wsum : 0.0;
  return acc / static_cast<double>(src.n());
}

double dr_estimate(const SourceDataset& src, const TargetDataset& tgt, const Functional& g,
                   const RegressorSpec& spec, std::uint64_t seed,
                   const DiscriminativeConfig& ratio_config) {
  validate_pair(src, tgt);
  const std::size_t n = src.n();
  if (n < 4) throw InsufficientData("double-robust estimation needs n >= 4");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix64(seed, 0x6472ULL));
  rng.shuffle(order);
  const std::size_t half = n / 2;

  SourceDataset ratio_half, model_half;
  ratio_half.d = model_half.d = src.d;
  for (std::size_t k = 0; k < n; ++k)
    (k < half ? ratio_half : model_half).samples.push_back(src.samples[order[k]]);

  const RatioModel ratio = fit_ratio_discriminative(ratio_half, tgt, ratio_config);

  std::vector<std::vector<double>> X;
  std::vector<double> z;
  for (const auto& s : model_half.samples) {
    X.push_back(s.x);
    z.push_back(g(s.x, s.y));
  }
  FittedModel m_hat;
  try {
    m_hat = fit(spec, X, z);
  } catch (const Error& e) {
    throw RegressionFailure(e.what());
  }

  double corr = 0.0;
  for (const auto& s : ratio_half.samples)
    corr += ratio_at(ratio, s.x) * (g(s.x, s.y) - predict(m_hat, s.x));
  double plug = 0.0;
  for (const auto& p : tgt.points) plug += predict(m_hat, p);
  return corr / static_cast<double>(half) + plug / static_cast<double>(tgt.m());
}

double ipw_estimate(const MissingDataset& md, const Functional& g,
                    const LogisticModel& propensity) {
  validate_missing(md);
  if (md.n_complete() == 0) throw NoCompleteCases("IPW needs at least one complete case");
  double acc = 0.0;
  for (const MissingRow& row : md.rows) {
    if (!row.observed()) continue;
    const double pi = std::max(predict_prob(propensity, row.x), kPropensityFloor);
    acc += g(row.x, *row.y) / pi;
  }
  return acc / static_cast<double>(md.N());
}

namespace {

LogisticModel fit_propensity(std::span<const MissingRow> rows, const LogisticSpec& spec) {
  std::vector<std::vector<double>> X;
  std::vector<int> labels;
  X.reserve(rows.size());
  for (const auto& row : rows) {
    X.push_back(row.x);
    labels.push_back(row.observed() ? 1 : 0);
  }
  return fit_logistic(X, labels, spec);
}

FittedModel fit_outcome_on_complete(std::span<const MissingRow> rows, const Functional& g,
                                    const RegressorSpec& spec) {
  std::vector<std::vector<double>> X;
  std::vector<double> z;
  for (const auto& row : rows) {
    if (!row.observed()) continue;
    X.push_back(row.x);
    z.push_back(g(row.x, *row.y));
  }
  if (X.empty()) throw RegressionFailure("no complete cases to fit the outcome model");
  try {
    return fit(spec, X, z);
  } catch (const Error& e) {
    throw RegressionFailure(e.what());
  }
}

double aipw_score_sum(std::span<const MissingRow> rows, const Functional& g,
                      const FittedModel& m_hat, const LogisticModel& propensity) {
  double acc = 0.0;
  for (const auto& row : rows) {
    const double pi = std::max(predict_prob(propensity, row.x), kPropensityFloor);
    const double mx = predict(m_hat, row.x);
    const double d = row.observed() ? 1.0 : 0.0;
    const double gv = row.observed() ? g(row.x, *row.y) : 0.0;
    acc += d * gv / pi - (d - pi) / pi * mx;
  }
  return acc;
}

}  // namespace

double aipw_estimate(const MissingDataset& md, const Functional& g, const RegressorSpec& spec,
                     const LogisticSpec& propensity_spec) {
  validate_missing(md);
  const FittedModel m_hat = fit_outcome_on_complete(md.rows, g, spec);
  const LogisticModel propensity = fit_propensity(md.rows, propensity_spec);
  return aipw_score_sum(md.rows, g, m_hat, propensity) / static_cast<double>(md.N());
}

double dml_estimate(const MissingDataset& md, const Functional& g, const RegressorSpec& spec,
                    const LogisticSpec& propensity_spec, std::uint64_t seed) {
  validate_missing(md);
  const std::size_t N = md.N();
  if (N < 8) throw InsufficientData("cross-fitting needs N >= 8");

  std::vector<std::size_t> order(N);
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng rng(mix64(seed, 0x646d6cULL));
  rng.shuffle(order);
  const std::size_t first = (N + 1) / 2;

  std::vector<MissingRow> fold[2];
  for (std::size_t k = 0; k < N; ++k) fold[k < first ? 0 : 1].push_back(md.rows[order[k]]);

  double total = 0.0;
  for (int h = 0; h < 2; ++h) {
    const auto& train = fold[1 - h];
    const auto& eval = fold[h];
    const FittedModel m_hat = fit_outcome_on_complete(train, g, spec);
    const LogisticModel propensity = fit_propensity(train, propensity_spec);
    total += aipw_score_sum(eval, g, m_hat, propensity);
  }
  return total / static_cast<double>(N);
}

double pl_missing_estimate(const MissingDataset& md, const Functional& g,
                           const RegressorSpec& spec) {
  validate_missing(md);
  const FittedModel m_hat = fit_outcome_on_complete(md.rows, g, spec);
  double acc = 0.0;
  for (const MissingRow& row : md.rows)
    acc += row.observed() ? g(row.x, *row.y) : predict(m_hat, row.x);
  return acc / static_cast<double>(md.N());
}

}  // namespace wshift
