#pragma once

#include <cstdint>
#include <vector>

#include "wshift/core.hpp"
#include "wshift/regressors.hpp"

namespace wshift {

enum class RatioKind { kliep, discriminative };

/// Fitted density-ratio model r(x); evaluations are clipped to [0, clip_max].
struct RatioModel {
  RatioKind kind = RatioKind::kliep;
  // kliep: Gaussian kernel mixture over target-point centers
  std::vector<std::vector<double>> centers;
  double bandwidth = 1.0;
  std::vector<double> alpha;
  // discriminative: logistic "is target" classifier, scaled by n/m
  LogisticModel classifier;
  double scale = 1.0;
  double clip_max = 50.0;
};

double ratio_at(const RatioModel& model, std::span<const double> x);

struct KliepConfig {
  std::size_t max_centers = 100;
  std::size_t max_iter = 500;
  double objective_tol = 1e-8;
  double clip_max = 50.0;
  std::uint64_t seed = 0;
};

struct DiscriminativeConfig {
  LogisticSpec logistic;
  double clip_max = 50.0;
};

/// Mean of g over the source sample.
double naive_estimate(const SourceDataset& src, const Functional& g);

/// Fit g(X, Y) on X over the full source; average predictions over targets.
double pl_estimate(const SourceDataset& src, const TargetDataset& tgt, const Functional& g,
                   const RegressorSpec& spec);

/// Direct density-ratio fit maximizing the target log-ratio subject to
/// alpha >= 0 and source-mean-one, by projected gradient ascent with
/// backtracking; the constraint is enforced exactly by a final rescale.
/// Kernel bandwidth is the median pairwise distance over pooled covariates.
RatioModel fit_ratio_kliep(const SourceDataset& src, const TargetDataset& tgt,
                           const KliepConfig& config = {});

/// Logistic source-vs-target classifier; r(x) = (n/m) * s(x) / (1 - s(x)).
RatioModel fit_ratio_discriminative(const SourceDataset& src, const TargetDataset& tgt,
                                    const DiscriminativeConfig& config = {});

/// Horvitz-Thompson importance-weighted mean (no self-normalization).
/// `hajek` switches to the self-normalized form for diagnostics only.
double iw_estimate(const SourceDataset& src, const Functional& g, const RatioModel& ratio,
                   bool hajek = false);

/// Sample-split double-robust estimate: first half of the shuffled source
/// fits the discriminative ratio (with the full target), the second half the
/// outcome regression; the correction term runs over the first half.
double dr_estimate(const SourceDataset& src, const TargetDataset& tgt, const Functional& g,
                   const RegressorSpec& spec, std::uint64_t seed,
                   const DiscriminativeConfig& ratio_config = {});

constexpr double kPropensityFloor = 0.01;

/// Inverse probability weighting with the propensity floored at 0.01.
double ipw_estimate(const MissingDataset& md, const Functional& g,
                    const LogisticModel& propensity);

/// Augmented IPW: outcome model on complete cases, propensity on (X, D).
double aipw_estimate(const MissingDataset& md, const Functional& g, const RegressorSpec& spec,
                     const LogisticSpec& propensity_spec = {});

/// Two-fold cross-fitted AIPW: nuisances fit on one fold score the other.
double dml_estimate(const MissingDataset& md, const Functional& g, const RegressorSpec& spec,
                    const LogisticSpec& propensity_spec, std::uint64_t seed);

/// Missing-data pseudo-labeling: observed rows keep g, missing rows take the
/// complete-case regression prediction, averaged over all N rows.
double pl_missing_estimate(const MissingDataset& md, const Functional& g,
                           const RegressorSpec& spec);

}  // namespace wshift
