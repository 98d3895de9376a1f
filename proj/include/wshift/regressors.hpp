#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "wshift/core.hpp"

namespace wshift {

enum class RegressorKind { ols, ridge, knn, boosted_stumps, null_model };

RegressorKind parse_regressor_kind(const std::string& name);
std::string regressor_kind_name(RegressorKind kind);

struct RegressorSpec {
  RegressorKind kind = RegressorKind::ols;
  double lambda = 1e-6;        // ridge
  std::size_t k = 5;           // knn
  std::size_t rounds = 200;    // boosted stumps
  double learning_rate = 0.1;  // boosted stumps
  std::size_t min_leaf = 5;    // boosted stumps

  void validate() const;
};

struct Stump {
  std::size_t axis = 0;
  double threshold = 0.0;
  double left_value = 0.0;   // x[axis] <= threshold
  double right_value = 0.0;  // x[axis] > threshold
  bool is_constant = false;  // no admissible split; left_value holds the fit
};

/// Immutable fitted model; predict() is deterministic and defined for any
/// finite vector of the training dimension.
struct FittedModel {
  RegressorKind kind = RegressorKind::null_model;
  std::size_t train_dim = 0;
  std::vector<double> coef;  // [intercept, b_1..b_d] for ols/ridge
  // knn keeps its training data
  std::vector<std::vector<double>> train_x;
  std::vector<double> train_z;
  std::size_t knn_k = 1;
  // boosted stumps
  double base_value = 0.0;
  std::vector<Stump> stumps;
  double learning_rate = 0.1;
};

FittedModel fit(const RegressorSpec& spec, std::span<const std::vector<double>> X,
                std::span<const double> z);

double predict(const FittedModel& model, std::span<const double> x);

struct LogisticSpec {
  double lambda = 1e-6;  // ridge penalty on slopes; intercept unpenalized
  std::size_t max_iter = 100;
  double tol = 1e-8;  // gradient norm
};

struct LogisticModel {
  double intercept = 0.0;
  std::vector<double> coef;
  bool converged = false;
  std::size_t iterations = 0;
};

/// Ridge-penalized logistic regression by IRLS with step halving; the
/// penalized log-likelihood never decreases across accepted iterations.
LogisticModel fit_logistic(std::span<const std::vector<double>> X,
                           std::span<const int> labels, const LogisticSpec& spec = {});

double predict_prob(const LogisticModel& model, std::span<const double> x);

/// Solves A x = b by Gaussian elimination with partial pivoting. Throws
/// SingularDesign when a pivot falls below 1e-10 (relative to the largest
/// entry of A).
std::vector<double> solve_linear_system(std::vector<double> A, std::vector<double> b,
                                        std::size_t dim);

}  // namespace wshift
