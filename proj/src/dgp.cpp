#include "wshift/dgp.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "wshift/stats.hpp"

namespace wshift {

namespace {

constexpr double kLogClamp = 1e-300;

double clamped_log(double arg) { return std::log(std::max(arg, kLogClamp)); }

double expit(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace

std::vector<double> DistSpec::draw(std::size_t d, Rng& rng) const {
  std::vector<double> x(d);
  if (kind == Kind::beta) {
    for (std::size_t l = 0; l < d; ++l) x[l] = rng.beta(beta_a, beta_b);
  } else {
    for (std::size_t l = 0; l < d; ++l) {
      const double mu = l < mean.size() ? mean[l] : 0.0;
      x[l] = mu + sd * rng.normal();
    }
  }
  return x;
}

double DistSpec::log_density(std::span<const double> x) const {
  if (kind == Kind::beta) {
    const double log_beta_fn =
        std::lgamma(beta_a) + std::lgamma(beta_b) - std::lgamma(beta_a + beta_b);
    double acc = 0.0;
    for (double t : x) {
      if (!(t > 0.0 && t < 1.0)) return -std::numeric_limits<double>::infinity();
      acc += (beta_a - 1.0) * std::log(t) + (beta_b - 1.0) * std::log1p(-t) - log_beta_fn;
    }
    return acc;
  }
  double acc = 0.0;
  const double norm = std::log(sd) + 0.5 * std::log(2.0 * std::numbers::pi);
  for (std::size_t l = 0; l < x.size(); ++l) {
    const double mu = l < mean.size() ? mean[l] : 0.0;
    const double z = (x[l] - mu) / sd;
    acc += -0.5 * z * z - norm;
  }
  return acc;
}

RegressionFunction parse_regression_function(const std::string& id) {
  if (id == "logsum") return RegressionFunction::logsum;
  if (id == "i") return RegressionFunction::f_i;
  if (id == "ii") return RegressionFunction::f_ii;
  if (id == "iii") return RegressionFunction::f_iii;
  if (id == "iv") return RegressionFunction::f_iv;
  if (id == "v") return RegressionFunction::f_v;
  if (id == "vi") return RegressionFunction::f_vi;
  throw ConfigError("unknown regression function id '" + id + "'");
}

std::string regression_function_name(RegressionFunction f) {
  switch (f) {
    case RegressionFunction::logsum: return "logsum";
    case RegressionFunction::f_i: return "i";
    case RegressionFunction::f_ii: return "ii";
    case RegressionFunction::f_iii: return "iii";
    case RegressionFunction::f_iv: return "iv";
    case RegressionFunction::f_v: return "v";
    case RegressionFunction::f_vi: return "vi";
  }
  return "?";
}

double eval_regression_function(RegressionFunction f, std::span<const double> x) {
  const double s = x[0] + x[1];
  switch (f) {
    case RegressionFunction::logsum:
    case RegressionFunction::f_ii:
      return clamped_log(s * s);
    case RegressionFunction::f_i:
      return s;
    case RegressionFunction::f_iii:
      return std::sin(s) + 2.0 * x[0] * x[0];
    case RegressionFunction::f_iv:
      return std::cos(s / 4.0) + clamped_log(x[0] * x[0] + x[1] * x[1]);
    case RegressionFunction::f_v:
      return 2.0 + std::abs(s);
    case RegressionFunction::f_vi:
      return 2.0 * std::sin(s + 2.0) * std::sin(x[0] + 1.0) + std::cos(s);
  }
  throw ConfigError("unreachable regression function");
}

double MARDGP::propensity(std::span<const double> x) const {
  double eta = propensity_intercept;
  for (std::size_t l = 0; l < x.size() && l < propensity_coef.size(); ++l)
    eta += propensity_coef[l] * x[l];
  return expit(eta);
}

std::pair<SourceDataset, TargetDataset> generate_cs(const CovariateShiftDGP& dgp, std::size_t n,
                                                    std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  SourceDataset src;
  src.d = dgp.d;
  src.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    LabeledSample s;
    s.x = dgp.source.draw(dgp.d, rng);
    s.y = eval_regression_function(dgp.f, s.x) + dgp.noise_sd * rng.normal();
    src.samples.push_back(std::move(s));
  }
  TargetDataset tgt;
  tgt.d = dgp.d;
  tgt.points.reserve(m);
  for (std::size_t j = 0; j < m; ++j) tgt.points.push_back(dgp.target.draw(dgp.d, rng));
  return {std::move(src), std::move(tgt)};
}

MissingDataset generate_mar(const MARDGP& dgp, std::size_t N, std::uint64_t seed) {
  Rng rng(seed);
  MissingDataset md;
  md.d = dgp.d;
  md.rows.reserve(N);
  for (std::size_t i = 0; i < N; ++i) {
    MissingRow row;
    row.x = dgp.covariates.draw(dgp.d, rng);
    double y = dgp.outcome_intercept + dgp.noise_sd * rng.normal();
    for (std::size_t l = 0; l < dgp.d && l < dgp.outcome_coef.size(); ++l)
      y += dgp.outcome_coef[l] * row.x[l];
    if (rng.bernoulli(dgp.propensity(row.x))) row.y = y;
    md.rows.push_back(std::move(row));
  }
  return md;
}

namespace {

// Streaming first four central moments (Pebay 2008); gives the asymptotic
// standard error of a sample variance.
class Moments4 {
 public:
  void add(double x) {
    const double n1 = static_cast<double>(count_);
    ++count_;
    const double n = static_cast<double>(count_);
    const double delta = x - mean_;
    const double delta_n = delta / n;
    const double delta_n2 = delta_n * delta_n;
    const double term1 = delta * delta_n * n1;
    mean_ += delta_n;
    m4_ += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * m2_ - 4.0 * delta_n * m3_;
    m3_ += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * m2_;
    m2_ += term1;
  }

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  double variance() const { return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0; }
  double se_of_mean() const {
    return count_ > 1 ? std::sqrt(variance() / static_cast<double>(count_)) : 0.0;
  }
  double se_of_variance() const {
    if (count_ < 2) return 0.0;
    const double n = static_cast<double>(count_);
    const double var = m2_ / n;
    const double m4 = m4_ / n;
    return std::sqrt(std::max(0.0, m4 - var * var) / n);
  }

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
  double m3_ = 0.0;
  double m4_ = 0.0;
};

double draw_g_cs(const CovariateShiftDGP& dgp, const Functional& g, Rng& rng,
                 std::vector<double>& x) {
  x = dgp.target.draw(dgp.d, rng);
  const double y = eval_regression_function(dgp.f, x) + dgp.noise_sd * rng.normal();
  return g(x, y);
}

double draw_g_mar(const MARDGP& dgp, const Functional& g, Rng& rng, std::vector<double>& x) {
  x = dgp.covariates.draw(dgp.d, rng);
  double y = dgp.outcome_intercept + dgp.noise_sd * rng.normal();
  for (std::size_t l = 0; l < dgp.d && l < dgp.outcome_coef.size(); ++l)
    y += dgp.outcome_coef[l] * x[l];
  return g(x, y);
}

}  // namespace

MonteCarloValue true_value(const CovariateShiftDGP& dgp, const Functional& g,
                           std::size_t precision_draws, std::uint64_t seed) {
  Rng rng(seed);
  Welford acc;
  std::vector<double> x;
  for (std::size_t k = 0; k < precision_draws; ++k) acc.add(draw_g_cs(dgp, g, rng, x));
  return {acc.mean(), acc.se_of_mean()};
}

MonteCarloValue true_value(const MARDGP& dgp, const Functional& g, std::size_t precision_draws,
                           std::uint64_t seed) {
  Rng rng(seed);
  Welford acc;
  std::vector<double> x;
  for (std::size_t k = 0; k < precision_draws; ++k) acc.add(draw_g_mar(dgp, g, rng, x));
  return {acc.mean(), acc.se_of_mean()};
}

MonteCarloValue true_sigma2(const CovariateShiftDGP& dgp, const Functional& g,
                            std::size_t precision_draws, std::uint64_t seed) {
  Rng rng(seed);
  Moments4 acc;
  std::vector<double> x;
  for (std::size_t k = 0; k < precision_draws; ++k) acc.add(draw_g_cs(dgp, g, rng, x));
  return {acc.variance(), acc.se_of_variance()};
}

MonteCarloValue true_sigma2(const MARDGP& dgp, const Functional& g, std::size_t precision_draws,
                            std::uint64_t seed) {
  Rng rng(seed);
  Moments4 acc;
  std::vector<double> x;
  for (std::size_t k = 0; k < precision_draws; ++k) acc.add(draw_g_mar(dgp, g, rng, x));
  return {acc.variance(), acc.se_of_variance()};
}

namespace {

// Conditional mean and variance of the built-in functionals given X.
struct ConditionalMoments {
  enum class Kind { response, coordinate_product } kind = Kind::response;
  std::size_t k = 1;  // 1-based coordinate

  static ConditionalMoments from(const Functional& g) {
    ConditionalMoments cm;
    if (g.label == "response") {
      cm.kind = Kind::response;
      return cm;
    }
    const std::string prefix = "xk_times_y:";
    if (g.label.rfind(prefix, 0) == 0) {
      cm.kind = Kind::coordinate_product;
      cm.k = static_cast<std::size_t>(std::stoul(g.label.substr(prefix.size())));
      return cm;
    }
    throw UnsupportedFunctional("efficiency bound needs an analytic conditional variance; '" +
                                g.label + "' has none");
  }

  double mean(const CovariateShiftDGP& dgp, std::span<const double> x) const {
    const double f = eval_regression_function(dgp.f, x);
    return kind == Kind::response ? f : x[k - 1] * f;
  }
  double variance(const CovariateShiftDGP& dgp, std::span<const double> x) const {
    const double v = dgp.noise_sd * dgp.noise_sd;
    return kind == Kind::response ? v : x[k - 1] * x[k - 1] * v;
  }
};

}  // namespace

BoundReport efficiency_bound(const CovariateShiftDGP& dgp, const Functional& g, double eta,
                             std::size_t precision_draws, std::uint64_t seed,
                             bool force_unit_ratio) {
  if (!(eta > 0.0 && eta < 1.0)) throw ConfigError("eta must lie in (0, 1)");
  const ConditionalMoments cm = ConditionalMoments::from(g);
  const double inv_target = 1.0 / (1.0 - eta);
  const double inv_source = 1.0 / eta;

  auto ratio = [&](std::span<const double> x) {
    if (force_unit_ratio) return 1.0;
    return std::exp(dgp.target.log_density(x) - dgp.source.log_density(x));
  };

  // Target stream: Var_1(g_1(X)) and sigma2 = Var_1(g(X, Y)).
  Rng tgt_rng(mix64(seed, 1));
  Moments4 g1_moments;
  Moments4 g_moments;
  std::vector<double> x(dgp.d);
  for (std::size_t k = 0; k < precision_draws; ++k) {
    x = dgp.target.draw(dgp.d, tgt_rng);
    const double y = eval_regression_function(dgp.f, x) + dgp.noise_sd * tgt_rng.normal();
    g1_moments.add(cm.mean(dgp, x));
    g_moments.add(g(x, y));
  }

  // Source stream: E_0[r^2 v] and the signed difference integrand
  // r v (r / eta - 1 / (1 - eta)).
  Rng src_rng(mix64(seed, 2));
  Welford b_acc;
  Welford diff_acc;
  for (std::size_t k = 0; k < precision_draws; ++k) {
    x = dgp.source.draw(dgp.d, src_rng);
    const double r = ratio(x);
    const double v = cm.variance(dgp, x);
    b_acc.add(r * r * v);
    diff_acc.add(r * v * (r * inv_source - inv_target));
  }

  BoundReport report;
  report.sigma2_eff.value = inv_target * g1_moments.variance() + inv_source * b_acc.mean();
  report.sigma2_eff.se = std::sqrt(std::pow(inv_target * g1_moments.se_of_variance(), 2) +
                                   std::pow(inv_source * b_acc.se_of_mean(), 2));
  report.sigma2_w.value = inv_target * g_moments.variance();
  report.sigma2_w.se = inv_target * g_moments.se_of_variance();
  report.difference.value = diff_acc.mean();
  report.difference.se = diff_acc.se_of_mean();
  return report;
}

}  // namespace wshift
