#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wshift {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct NonFiniteValue : Error { using Error::Error; };
struct NoCompleteCases : Error { using Error::Error; };
struct IndexOutOfRange : Error { using Error::Error; };
struct InstanceTooLarge : Error { using Error::Error; };
struct InfeasibleMarginals : Error { using Error::Error; };
struct NotUnivariate : Error { using Error::Error; };
struct SingularDesign : Error { using Error::Error; };
struct EmptyTrainingSet : Error { using Error::Error; };
struct InsufficientData : Error { using Error::Error; };
struct RegressionFailure : Error { using Error::Error; };
struct DegenerateKernel : Error { using Error::Error; };
struct UnsupportedFunctional : Error { using Error::Error; };
struct EmptySample : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

/// One labeled source observation: covariate vector and scalar response.
struct LabeledSample {
  std::vector<double> x;
  double y = 0.0;
};

/// Labeled sample from the source population. Ordering is significant:
/// tie-breaking and seeding reference positions in `samples`.
struct SourceDataset {
  std::vector<LabeledSample> samples;
  std::size_t d = 0;

  std::size_t n() const { return samples.size(); }
};

/// Covariate-only sample from the target population.
struct TargetDataset {
  std::vector<std::vector<double>> points;
  std::size_t d = 0;

  std::size_t m() const { return points.size(); }
};

/// One row of a dataset with possibly missing response. The missingness
/// indicator D is `y.has_value()`.
struct MissingRow {
  std::vector<double> x;
  std::optional<double> y;

  bool observed() const { return y.has_value(); }
};

struct MissingDataset {
  std::vector<MissingRow> rows;
  std::size_t d = 0;

  std::size_t N() const { return rows.size(); }
  std::size_t n_complete() const;
};

/// The functional of interest g(x, y). Evaluators must be deterministic and
/// finite on finite inputs.
struct Functional {
  std::function<double(std::span<const double>, double)> eval;
  std::string label;

  double operator()(std::span<const double> x, double y) const { return eval(x, y); }
};

/// g(x, y) = y.
Functional response_functional();

/// g(x, y) = x_k * y with 1-based coordinate index k.
Functional coordinate_product_functional(std::size_t k);

/// Parses "response" or "xk_times_y:<k>".
Functional parse_functional(const std::string& id);

/// Point estimate with plug-in variance and Wald interval.
struct EstimateReport {
  double theta_hat = 0.0;
  double sigma2_hat = 0.0;
  double stderr_hat = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double level = 0.95;
  std::string method;
  std::size_t n = 0;
  std::size_t m = 0;
};

/// Checks that (src, tgt) form a usable covariate-shift pair: equal covariate
/// dimension, at least one point on each side, all entries finite.
void validate_pair(const SourceDataset& src, const TargetDataset& tgt);

void validate_missing(const MissingDataset& md);

/// Partitions a missing-data set into complete cases (source, original order)
/// and incomplete cases (target, original order). m = 0 is legal; all rows
/// incomplete is an error.
std::pair<SourceDataset, TargetDataset> split_missing(const MissingDataset& md);

}  // namespace wshift
