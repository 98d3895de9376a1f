#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wshift/core.hpp"
#include "wshift/rng.hpp"

namespace wshift {

/// Per-coordinate covariate law: iid Beta(a, b) or isotropic Gaussian.
struct DistSpec {
  enum class Kind { beta, gaussian } kind = Kind::gaussian;
  double beta_a = 2.0;
  double beta_b = 3.0;
  std::vector<double> mean;  // gaussian; length d
  double sd = 1.0;           // gaussian, sigma * I

  std::vector<double> draw(std::size_t d, Rng& rng) const;
  double log_density(std::span<const double> x) const;
};

/// Regression-function ids. "logsum" is the consistency-study function
/// log((x1+x2)^2); "i".."vi" are the shift-study functions. Log arguments are
/// clamped at 1e-300, so measure-zero singularities evaluate finite.
enum class RegressionFunction { logsum, f_i, f_ii, f_iii, f_iv, f_v, f_vi };

RegressionFunction parse_regression_function(const std::string& id);
std::string regression_function_name(RegressionFunction f);
double eval_regression_function(RegressionFunction f, std::span<const double> x);

struct CovariateShiftDGP {
  DistSpec source;
  DistSpec target;
  std::size_t d = 2;
  RegressionFunction f = RegressionFunction::logsum;
  double noise_sd = 0.1;
};

struct MARDGP {
  DistSpec covariates;
  std::size_t d = 2;
  double outcome_intercept = 1.0;
  std::vector<double> outcome_coef;
  double noise_sd = 0.1;
  double propensity_intercept = 0.5;
  std::vector<double> propensity_coef;

  double propensity(std::span<const double> x) const;
};

std::pair<SourceDataset, TargetDataset> generate_cs(const CovariateShiftDGP& dgp, std::size_t n,
                                                    std::size_t m, std::uint64_t seed);

MissingDataset generate_mar(const MARDGP& dgp, std::size_t N, std::uint64_t seed);

struct MonteCarloValue {
  double value = 0.0;
  double se = 0.0;
};

/// High-precision Monte Carlo estimate of the target-population mean of g
/// (the overall mean for MAR), with its standard error.
MonteCarloValue true_value(const CovariateShiftDGP& dgp, const Functional& g,
                           std::size_t precision_draws, std::uint64_t seed);
MonteCarloValue true_value(const MARDGP& dgp, const Functional& g, std::size_t precision_draws,
                           std::uint64_t seed);

/// Target-population variance of g (Var(g(X, Y)) for MAR), with the standard
/// error of the variance estimate.
MonteCarloValue true_sigma2(const CovariateShiftDGP& dgp, const Functional& g,
                            std::size_t precision_draws, std::uint64_t seed);
MonteCarloValue true_sigma2(const MARDGP& dgp, const Functional& g, std::size_t precision_draws,
                            std::uint64_t seed);

struct BoundReport {
  MonteCarloValue sigma2_eff;  // RAL efficiency lower bound (scaled by N)
  MonteCarloValue sigma2_w;    // (1 - eta)^-1 * sigma2 for the W-estimator
  MonteCarloValue difference;  // sigma2_eff - sigma2_w, single-stream MC
};

/// Efficiency lower bound sigma2_eff = (1-eta)^-1 Var_1(g_1(X))
/// + eta^-1 E_0[r^2(X) Var(g | X)] using the analytic density ratio of the
/// two covariate laws, plus the matched W-variance and their difference with
/// Monte Carlo standard errors. `force_unit_ratio` substitutes r == 1.
BoundReport efficiency_bound(const CovariateShiftDGP& dgp, const Functional& g, double eta,
                             std::size_t precision_draws, std::uint64_t seed,
                             bool force_unit_ratio = false);

}  // namespace wshift
