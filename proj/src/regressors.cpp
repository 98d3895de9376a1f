#include "wshift/regressors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wshift {

RegressorKind parse_regressor_kind(const std::string& name) {
  if (name == "ols") return RegressorKind::ols;
  if (name == "ridge") return RegressorKind::ridge;
  if (name == "knn") return RegressorKind::knn;
  if (name == "boosted_stumps") return RegressorKind::boosted_stumps;
  if (name == "null") return RegressorKind::null_model;
  throw ConfigError("unknown regressor kind '" + name + "'");
}

std::string regressor_kind_name(RegressorKind kind) {
  switch (kind) {
    case RegressorKind::ols: return "ols";
    case RegressorKind::ridge: return "ridge";
    case RegressorKind::knn: return "knn";
    case RegressorKind::boosted_stumps: return "boosted_stumps";
    case RegressorKind::null_model: return "null";
  }
  return "?";
}

void RegressorSpec::validate() const {
  if (lambda < 0) throw ConfigError("ridge lambda must be >= 0");
  if (k < 1) throw ConfigError("knn k must be >= 1");
  if (rounds < 1) throw ConfigError("boosted_stumps rounds must be >= 1");
  if (!(learning_rate > 0 && learning_rate <= 1))
    throw ConfigError("boosted_stumps learning_rate must be in (0, 1]");
}

std::vector<double> solve_linear_system(std::vector<double> A, std::vector<double> b,
                                        std::size_t dim) {
  double scale = 0.0;
  for (double a : A) scale = std::max(scale, std::abs(a));
  const double pivot_tol = 1e-10 * std::max(1.0, scale);

  for (std::size_t col = 0; col < dim; ++col) {
    std::size_t pivot = col;
    for (std::size_t r = col + 1; r < dim; ++r)
      if (std::abs(A[r * dim + col]) > std::abs(A[pivot * dim + col])) pivot = r;
    if (std::abs(A[pivot * dim + col]) < pivot_tol)
      throw SingularDesign("normal equations are singular (pivot below tolerance)");
    if (pivot != col) {
      for (std::size_t c = 0; c < dim; ++c) std::swap(A[pivot * dim + c], A[col * dim + c]);
      std::swap(b[pivot], b[col]);
    }
    for (std::size_t r = col + 1; r < dim; ++r) {
      const double factor = A[r * dim + col] / A[col * dim + col];
      if (factor == 0.0) continue;
      for (std::size_t c = col; c < dim; ++c) A[r * dim + c] -= factor * A[col * dim + c];
      b[r] -= factor * b[col];
    }
  }
  std::vector<double> x(dim);
  for (std::size_t r = dim; r-- > 0;) {
    double acc = b[r];
    for (std::size_t c = r + 1; c < dim; ++c) acc -= A[r * dim + c] * x[c];
    x[r] = acc / A[r * dim + r];
  }
  return x;
}

namespace {

FittedModel fit_linear(const RegressorSpec& spec, std::span<const std::vector<double>> X,
                       std::span<const double> z) {
  const std::size_t d = X.front().size();
  const std::size_t dim = d + 1;  // intercept first
  std::vector<double> A(dim * dim, 0.0);
  std::vector<double> b(dim, 0.0);
  for (std::size_t r = 0; r < X.size(); ++r) {
    // Row vector (1, x); accumulate X^T X and X^T z.
    for (std::size_t a = 0; a < dim; ++a) {
      const double xa = a == 0 ? 1.0 : X[r][a - 1];
      b[a] += xa * z[r];
      for (std::size_t c = 0; c < dim; ++c) {
        const double xc = c == 0 ? 1.0 : X[r][c - 1];
        A[a * dim + c] += xa * xc;
      }
    }
  }
  const double lambda = spec.kind == RegressorKind::ridge ? spec.lambda : 0.0;
  for (std::size_t a = 1; a < dim; ++a) A[a * dim + a] += lambda;  // intercept unpenalized

  FittedModel model;
  model.kind = spec.kind;
  model.train_dim = d;
  model.coef = solve_linear_system(std::move(A), std::move(b), dim);
  return model;
}

Stump fit_stump(std::span<const std::vector<double>> X, const std::vector<double>& residual,
                std::size_t min_leaf) {
  const std::size_t n = X.size();
  const std::size_t d = X.front().size();
  const double total = std::accumulate(residual.begin(), residual.end(), 0.0);

  Stump best;
  best.is_constant = true;
  best.left_value = total / static_cast<double>(n);
  // SSE improvement of a split vs the constant fit: L^2/nl + R^2/nr - T^2/n.
  double best_gain = 0.0;

  std::vector<std::size_t> order(n);
  for (std::size_t axis = 0; axis < d; ++axis) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return X[a][axis] < X[b][axis]; });
    double left_sum = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
      left_sum += residual[order[k]];
      const double xv = X[order[k]][axis];
      const double xn = X[order[k + 1]][axis];
      if (xv == xn) continue;  // can only split between distinct values
      const std::size_t nl = k + 1;
      const std::size_t nr = n - nl;
      if (nl < min_leaf || nr < min_leaf) continue;
      const double right_sum = total - left_sum;
      const double gain = left_sum * left_sum / static_cast<double>(nl) +
                          right_sum * right_sum / static_cast<double>(nr) -
                          total * total / static_cast<double>(n);
      if (gain > best_gain) {
        best_gain = gain;
        best.is_constant = false;
        best.axis = axis;
        best.threshold = 0.5 * (xv + xn);
        best.left_value = left_sum / static_cast<double>(nl);
        best.right_value = right_sum / static_cast<double>(nr);
      }
    }
  }
  return best;
}

FittedModel fit_stumps(const RegressorSpec& spec, std::span<const std::vector<double>> X,
                       std::span<const double> z) {
  FittedModel model;
  model.kind = RegressorKind::boosted_stumps;
  model.train_dim = X.front().size();
  model.learning_rate = spec.learning_rate;

  const std::size_t n = X.size();
  model.base_value = std::accumulate(z.begin(), z.end(), 0.0) / static_cast<double>(n);
  std::vector<double> residual(n);
  for (std::size_t r = 0; r < n; ++r) residual[r] = z[r] - model.base_value;

  model.stumps.reserve(spec.rounds);
  for (std::size_t round = 0; round < spec.rounds; ++round) {
    Stump s = fit_stump(X, residual, spec.min_leaf);
    for (std::size_t r = 0; r < n; ++r) {
      const double fitted = s.is_constant || X[r][s.axis] <= s.threshold ? s.left_value
                                                                         : s.right_value;
      residual[r] -= spec.learning_rate * fitted;
    }
    model.stumps.push_back(s);
  }
  return model;
}

}  // namespace

FittedModel fit(const RegressorSpec& spec, std::span<const std::vector<double>> X,
                std::span<const double> z) {
  spec.validate();
  if (X.empty() || z.empty()) throw EmptyTrainingSet("regression training set is empty");
  if (X.size() != z.size()) throw DimensionMismatch("covariate/response row counts differ");

  switch (spec.kind) {
    case RegressorKind::null_model: {
      FittedModel model;
      model.kind = RegressorKind::null_model;
      model.train_dim = X.front().size();
      return model;
    }
    case RegressorKind::ols:
    case RegressorKind::ridge:
      return fit_linear(spec, X, z);
    case RegressorKind::knn: {
      FittedModel model;
      model.kind = RegressorKind::knn;
      model.train_dim = X.front().size();
      model.train_x.assign(X.begin(), X.end());
      model.train_z.assign(z.begin(), z.end());
      model.knn_k = spec.k;
      return model;
    }
    case RegressorKind::boosted_stumps:
      return fit_stumps(spec, X, z);
  }
  throw ConfigError("unreachable regressor kind");
}

double predict(const FittedModel& model, std::span<const double> x) {
  if (model.kind != RegressorKind::null_model && x.size() != model.train_dim)
    throw DimensionMismatch("prediction input dimension != training dimension");

  switch (model.kind) {
    case RegressorKind::null_model:
      return 0.0;
    case RegressorKind::ols:
    case RegressorKind::ridge: {
      double acc = model.coef[0];
      for (std::size_t l = 0; l < model.train_dim; ++l) acc += model.coef[l + 1] * x[l];
      return acc;
    }
    case RegressorKind::knn: {
      const std::size_t n = model.train_x.size();
      const std::size_t k = std::min<std::size_t>(model.knn_k, n);
      // (distance, index) selection; smallest index wins ties.
      std::vector<std::pair<double, std::size_t>> dist(n);
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t l = 0; l < model.train_dim; ++l) {
          const double diff = model.train_x[i][l] - x[l];
          acc += diff * diff;
        }
        dist[i] = {acc, i};
      }
      std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t) acc += model.train_z[dist[t].second];
      return acc / static_cast<double>(k);
    }
    case RegressorKind::boosted_stumps: {
      double acc = model.base_value;
      for (const Stump& s : model.stumps) {
        const double fitted = s.is_constant || x[s.axis] <= s.threshold ? s.left_value
                                                                        : s.right_value;
        acc += model.learning_rate * fitted;
      }
      return acc;
    }
  }
  throw ConfigError("unreachable model kind");
}

namespace {

double expit(double t) { return 1.0 / (1.0 + std::exp(-t)); }

double penalized_loglik(std::span<const std::vector<double>> X, std::span<const int> labels,
                        const std::vector<double>& theta, double lambda) {
  const std::size_t d = theta.size() - 1;
  double ll = 0.0;
  for (std::size_t r = 0; r < X.size(); ++r) {
    double eta = theta[0];
    for (std::size_t l = 0; l < d; ++l) eta += theta[l + 1] * X[r][l];
    // log-likelihood term: y*eta - log(1 + e^eta), computed stably.
    const double softplus = eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
    ll += labels[r] * eta - softplus;
  }
  double penalty = 0.0;
  for (std::size_t l = 0; l < d; ++l) penalty += theta[l + 1] * theta[l + 1];
  return ll - 0.5 * lambda * penalty;
}

}  // namespace

LogisticModel fit_logistic(std::span<const std::vector<double>> X, std::span<const int> labels,
                           const LogisticSpec& spec) {
  if (X.empty()) throw EmptyTrainingSet("logistic training set is empty");
  if (X.size() != labels.size()) throw DimensionMismatch("covariate/label row counts differ");
  const std::size_t d = X.front().size();
  const std::size_t dim = d + 1;

  std::vector<double> theta(dim, 0.0);
  double ll = penalized_loglik(X, labels, theta, spec.lambda);
  LogisticModel model;

  std::size_t iter = 0;
  for (; iter < spec.max_iter; ++iter) {
    // Gradient and expected Hessian at theta.
    std::vector<double> grad(dim, 0.0);
    std::vector<double> H(dim * dim, 0.0);
    for (std::size_t r = 0; r < X.size(); ++r) {
      double eta = theta[0];
      for (std::size_t l = 0; l < d; ++l) eta += theta[l + 1] * X[r][l];
      const double p = expit(eta);
      const double w = std::max(p * (1.0 - p), 1e-12);
      const double resid = labels[r] - p;
      for (std::size_t a = 0; a < dim; ++a) {
        const double xa = a == 0 ? 1.0 : X[r][a - 1];
        grad[a] += xa * resid;
        for (std::size_t c = 0; c < dim; ++c) {
          const double xc = c == 0 ? 1.0 : X[r][c - 1];
          H[a * dim + c] += w * xa * xc;
        }
      }
    }
    for (std::size_t l = 1; l < dim; ++l) {
      grad[l] -= spec.lambda * theta[l];
      H[l * dim + l] += spec.lambda;
    }

    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    if (std::sqrt(gnorm) < spec.tol) {
      model.converged = true;
      break;
    }

    std::vector<double> step;
    try {
      step = solve_linear_system(H, grad, dim);
    } catch (const SingularDesign&) {
      break;  // flat Hessian: report unconverged at the current point
    }

    // Step halving: accept the longest step that does not decrease the
    // penalized log-likelihood.
    double factor = 1.0;
    bool accepted = false;
    for (int h = 0; h < 30; ++h) {
      std::vector<double> candidate(dim);
      for (std::size_t a = 0; a < dim; ++a) candidate[a] = theta[a] + factor * step[a];
      const double cand_ll = penalized_loglik(X, labels, candidate, spec.lambda);
      if (cand_ll >= ll) {
        theta = std::move(candidate);
        ll = cand_ll;
        accepted = true;
        break;
      }
      factor *= 0.5;
    }
    if (!accepted) break;
  }

  model.intercept = theta[0];
  model.coef.assign(theta.begin() + 1, theta.end());
  model.iterations = iter;
  return model;
}

double predict_prob(const LogisticModel& model, std::span<const double> x) {
  if (x.size() != model.coef.size())
    throw DimensionMismatch("prediction input dimension != training dimension");
  double eta = model.intercept;
  for (std::size_t l = 0; l < x.size(); ++l) eta += model.coef[l] * x[l];
  return expit(eta);
}

}  // namespace wshift
