#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "wshift/baselines.hpp"
#include "wshift/core.hpp"
#include "wshift/dgp.hpp"
#include "wshift/regressors.hpp"

namespace wshift {

/// Roster entry: estimator name plus whatever nuisance configuration that
/// estimator consumes. Valid names: naive, pl, iw_kl, iw_dc, dr, w_v, w_e
/// (covariate shift); naive, pl, ipw, aipw, dml, w_v, w_s (missing data).
struct EstimatorSpec {
  std::string name;
  RegressorSpec regressor;
  LogisticSpec propensity;
  KliepConfig kliep;
  DiscriminativeConfig discriminative;
  bool hajek = false;
};

struct MonteCarloConfig {
  std::variant<CovariateShiftDGP, MARDGP> dgp;
  std::vector<EstimatorSpec> estimators;
  std::string g_id = "response";
  std::size_t n = 0;  // covariate shift
  std::size_t m = 0;
  std::size_t N = 0;  // missing data
  std::size_t replications = 1;
  std::uint64_t base_seed = 0;
  double level = 0.95;
  std::size_t truth_draws = 10'000'000;
  std::size_t workers = 0;  // 0 = hardware concurrency

  bool is_mar() const { return std::holds_alternative<MARDGP>(dgp); }
  void validate() const;
};

struct RepRecord {
  std::size_t rep = 0;  // 1-based
  std::string estimator;
  bool ok = false;
  std::string error;
  double estimate = 0.0;
  std::optional<double> sigma2_hat;
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
  std::optional<bool> covered;
  std::uint64_t seed = 0;  // data substream seed for this replication
};

struct SummaryRow {
  std::string estimator;
  std::size_t n_ok = 0;
  std::size_t n_fail = 0;
  double mean = 0.0;
  double bias = 0.0;
  double variance = 0.0;  // population variance over replications
  double mse = 0.0;
  std::optional<double> coverage;
  std::optional<double> ks;  // KS distance of the self-standardized estimates
};

struct MonteCarloResult {
  double truth = 0.0;
  double truth_se = 0.0;
  std::vector<RepRecord> replications;  // ordered by (rep, roster position)
  std::vector<SummaryRow> summary;      // roster order
  std::string config_echo;              // JSON text, optional, set by the caller
};

/// Outcome of one estimator on one dataset; variance fields only for the
/// W-family which carries a Wald interval.
struct EstimatorOutcome {
  double estimate = 0.0;
  std::optional<double> sigma2_hat;
  std::optional<double> stderr_hat;
  std::optional<double> ci_lower;
  std::optional<double> ci_upper;
};

EstimatorOutcome run_estimator_cs(const EstimatorSpec& spec, const SourceDataset& src,
                                  const TargetDataset& tgt, const Functional& g, double level,
                                  std::uint64_t seed);

EstimatorOutcome run_estimator_md(const EstimatorSpec& spec, const MissingDataset& md,
                                  const Functional& g, double level, std::uint64_t seed);

/// Seed for the data of replication `rep` (1-based). Estimator-internal
/// randomness uses estimator_stream_seed so rosters can change without
/// perturbing other estimators' streams.
std::uint64_t replication_data_seed(std::uint64_t base_seed, std::size_t rep);
std::uint64_t estimator_stream_seed(std::uint64_t base_seed, std::size_t rep,
                                    const std::string& estimator);

/// Runs the full experiment: R independent replications, every roster
/// estimator on each, truth from a high-precision stream, deterministic in
/// (config, base_seed) regardless of worker count. Per-estimator failures
/// become missing cells, not run aborts.
MonteCarloResult run_monte_carlo(const MonteCarloConfig& config);

enum class EmitFormat { csv, json };

/// Writes the per-replication table and summary. CSV mode writes
/// <prefix>_replications.csv and <prefix>_summary.csv; JSON mode writes
/// <prefix>.json with both tables, the config echo, and truth metadata.
void emit(const MonteCarloResult& result, const std::string& path_prefix, EmitFormat format);

}  // namespace wshift
