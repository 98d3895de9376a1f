#include "wshift/simbench.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <unordered_map>

#include <json.hpp>

#include "wshift/estimators_cs.hpp"
#include "wshift/estimators_md.hpp"
#include "wshift/stats.hpp"

namespace wshift {

namespace {

const std::set<std::string> kCsEstimators = {"naive", "pl", "iw_kl", "iw_dc",
                                             "dr",    "w_v", "w_e"};
const std::set<std::string> kMdEstimators = {"naive", "pl",  "ipw", "aipw",
                                             "dml",   "w_v", "w_s"};

}  // namespace

void MonteCarloConfig::validate() const {
  if (replications < 1) throw ConfigError("replications must be >= 1");
  if (!(level > 0.0 && level < 1.0)) throw ConfigError("level must be in (0, 1)");
  if (estimators.empty()) throw ConfigError("estimator roster is empty");
  if (truth_draws < 100'000) throw ConfigError("truth_draws must be >= 1e5");
  const auto& valid = is_mar() ? kMdEstimators : kCsEstimators;
  for (const auto& e : estimators) {
    if (!valid.count(e.name))
      throw ConfigError("estimator '" + e.name + "' is not available for this DGP kind");
    e.regressor.validate();
  }
  if (is_mar()) {
    if (N < 1) throw ConfigError("N must be >= 1 for missing-data runs");
  } else {
    if (n < 1 || m < 1) throw ConfigError("n and m must be >= 1 for covariate-shift runs");
  }
  parse_functional(g_id);
}

std::uint64_t replication_data_seed(std::uint64_t base_seed, std::size_t rep) {
  return mix64(mix64(base_seed, rep), fnv1a64("data"));
}

std::uint64_t estimator_stream_seed(std::uint64_t base_seed, std::size_t rep,
                                    const std::string& estimator) {
  return mix64(mix64(base_seed, rep), fnv1a64(estimator));
}

EstimatorOutcome run_estimator_cs(const EstimatorSpec& spec, const SourceDataset& src,
                                  const TargetDataset& tgt, const Functional& g, double level,
                                  std::uint64_t seed) {
  EstimatorOutcome out;
  if (spec.name == "w_v") {
    const EstimateReport r = w_estimate(src, tgt, g, level);
    out = {r.theta_hat, r.sigma2_hat, r.stderr_hat, r.ci_lower, r.ci_upper};
  } else if (spec.name == "w_e") {
    const EstimateReport r = enhanced_w_estimate(src, tgt, g, spec.regressor, seed, level);
    out = {r.theta_hat, r.sigma2_hat, r.stderr_hat, r.ci_lower, r.ci_upper};
  } else if (spec.name == "naive") {
    out.estimate = naive_estimate(src, g);
  } else if (spec.name == "pl") {
    out.estimate = pl_estimate(src, tgt, g, spec.regressor);
  } else if (spec.name == "iw_kl") {
    KliepConfig cfg = spec.kliep;
    cfg.seed = seed;
    out.estimate = iw_estimate(src, g, fit_ratio_kliep(src, tgt, cfg), spec.hajek);
  } else if (spec.name == "iw_dc") {
    out.estimate =
        iw_estimate(src, g, fit_ratio_discriminative(src, tgt, spec.discriminative), spec.hajek);
  } else if (spec.name == "dr") {
    out.estimate = dr_estimate(src, tgt, g, spec.regressor, seed, spec.discriminative);
  } else {
    throw ConfigError("estimator '" + spec.name + "' is not a covariate-shift estimator");
  }
  return out;
}

EstimatorOutcome run_estimator_md(const EstimatorSpec& spec, const MissingDataset& md,
                                  const Functional& g, double level, std::uint64_t seed) {
  EstimatorOutcome out;
  if (spec.name == "w_v") {
    const EstimateReport r = md_w_estimate(md, g, level);
    out = {r.theta_hat, r.sigma2_hat, r.stderr_hat, r.ci_lower, r.ci_upper};
  } else if (spec.name == "w_s") {
    const EstimateReport r = md_enhanced_w_estimate(md, g, spec.regressor, seed, level);
    out = {r.theta_hat, r.sigma2_hat, r.stderr_hat, r.ci_lower, r.ci_upper};
  } else if (spec.name == "naive") {
    auto [src, tgt] = split_missing(md);
    out.estimate = naive_estimate(src, g);
  } else if (spec.name == "pl") {
    out.estimate = pl_missing_estimate(md, g, spec.regressor);
  } else if (spec.name == "ipw") {
    std::vector<std::vector<double>> X;
    std::vector<int> labels;
    for (const auto& row : md.rows) {
      X.push_back(row.x);
      labels.push_back(row.observed() ? 1 : 0);
    }
    out.estimate = ipw_estimate(md, g, fit_logistic(X, labels, spec.propensity));
  } else if (spec.name == "aipw") {
    out.estimate = aipw_estimate(md, g, spec.regressor, spec.propensity);
  } else if (spec.name == "dml") {
    out.estimate = dml_estimate(md, g, spec.regressor, spec.propensity, seed);
  } else {
    throw ConfigError("estimator '" + spec.name + "' is not a missing-data estimator");
  }
  return out;
}

namespace {

// Truth values are expensive (default 1e7 draws); cache per process.
struct TruthKey {
  std::string dgp;
  std::string g;
  std::size_t draws;
  std::uint64_t seed;
  bool operator==(const TruthKey&) const = default;
};

struct TruthKeyHash {
  std::size_t operator()(const TruthKey& k) const {
    return mix64(mix64(fnv1a64(k.dgp), fnv1a64(k.g)), mix64(k.draws, k.seed));
  }
};

std::string dgp_fingerprint(const std::variant<CovariateShiftDGP, MARDGP>& dgp) {
  std::ostringstream os;
  os.precision(17);
  auto dist = [&os](const DistSpec& d) {
    if (d.kind == DistSpec::Kind::beta) {
      os << "beta(" << d.beta_a << "," << d.beta_b << ")";
    } else {
      os << "gauss(";
      for (double t : d.mean) os << t << ",";
      os << d.sd << ")";
    }
  };
  if (std::holds_alternative<CovariateShiftDGP>(dgp)) {
    const auto& cs = std::get<CovariateShiftDGP>(dgp);
    os << "cs d=" << cs.d << " src=";
    dist(cs.source);
    os << " tgt=";
    dist(cs.target);
    os << " f=" << regression_function_name(cs.f) << " noise=" << cs.noise_sd;
  } else {
    const auto& mar = std::get<MARDGP>(dgp);
    os << "mar d=" << mar.d << " cov=";
    dist(mar.covariates);
    os << " out=" << mar.outcome_intercept << ":";
    for (double t : mar.outcome_coef) os << t << ",";
    os << mar.noise_sd << " prop=" << mar.propensity_intercept << ":";
    for (double t : mar.propensity_coef) os << t << ",";
  }
  return os.str();
}

MonteCarloValue cached_truth(const MonteCarloConfig& config, const Functional& g) {
  static std::mutex mutex;
  static std::unordered_map<TruthKey, MonteCarloValue, TruthKeyHash> cache;

  const std::uint64_t seed = mix64(config.base_seed, fnv1a64("truth"));
  const TruthKey key{dgp_fingerprint(config.dgp), g.label, config.truth_draws, seed};
  {
    std::lock_guard<std::mutex> lock(mutex);
    const auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  MonteCarloValue value;
  if (config.is_mar())
    value = true_value(std::get<MARDGP>(config.dgp), g, config.truth_draws, seed);
  else
    value = true_value(std::get<CovariateShiftDGP>(config.dgp), g, config.truth_draws, seed);
  std::lock_guard<std::mutex> lock(mutex);
  cache.emplace(key, value);
  return value;
}

}  // namespace

MonteCarloResult run_monte_carlo(const MonteCarloConfig& config) {
  config.validate();
  const Functional g = parse_functional(config.g_id);
  const std::size_t R = config.replications;
  const std::size_t E = config.estimators.size();

  MonteCarloResult result;
  const MonteCarloValue truth = cached_truth(config, g);
  result.truth = truth.value;
  result.truth_se = truth.se;
  result.replications.resize(R * E);

  std::atomic<std::size_t> next_rep{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t rep_index = next_rep.fetch_add(1);
      if (rep_index >= R) return;
      const std::size_t rep = rep_index + 1;
      const std::uint64_t data_seed = replication_data_seed(config.base_seed, rep);

      SourceDataset src;
      TargetDataset tgt;
      MissingDataset md;
      if (config.is_mar()) {
        md = generate_mar(std::get<MARDGP>(config.dgp), config.N, data_seed);
      } else {
        std::tie(src, tgt) =
            generate_cs(std::get<CovariateShiftDGP>(config.dgp), config.n, config.m, data_seed);
      }

      for (std::size_t e = 0; e < E; ++e) {
        const EstimatorSpec& spec = config.estimators[e];
        RepRecord& record = result.replications[rep_index * E + e];
        record.rep = rep;
        record.estimator = spec.name;
        record.seed = data_seed;
        const std::uint64_t est_seed =
            estimator_stream_seed(config.base_seed, rep, spec.name);
        try {
          const EstimatorOutcome out =
              config.is_mar() ? run_estimator_md(spec, md, g, config.level, est_seed)
                              : run_estimator_cs(spec, src, tgt, g, config.level, est_seed);
          record.ok = true;
          record.estimate = out.estimate;
          record.sigma2_hat = out.sigma2_hat;
          record.ci_lower = out.ci_lower;
          record.ci_upper = out.ci_upper;
          if (out.ci_lower && out.ci_upper)
            record.covered = *out.ci_lower <= result.truth && result.truth <= *out.ci_upper;
        } catch (const std::exception& e2) {
          record.ok = false;
          record.error = e2.what();
        }
      }
    }
  };

  std::size_t workers = config.workers ? config.workers : std::thread::hardware_concurrency();
  workers = std::max<std::size_t>(1, std::min(workers, R));
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Summaries in roster order.
  for (std::size_t e = 0; e < E; ++e) {
    SummaryRow row;
    row.estimator = config.estimators[e].name;
    Welford acc;
    double sq_err = 0.0;
    std::size_t covered = 0;
    std::size_t with_ci = 0;
    std::vector<double> estimates;
    for (std::size_t rep_index = 0; rep_index < R; ++rep_index) {
      const RepRecord& record = result.replications[rep_index * E + e];
      if (!record.ok) {
        ++row.n_fail;
        continue;
      }
      ++row.n_ok;
      acc.add(record.estimate);
      estimates.push_back(record.estimate);
      const double err = record.estimate - result.truth;
      sq_err += err * err;
      if (record.covered) {
        ++with_ci;
        if (*record.covered) ++covered;
      }
    }
    if (row.n_ok > 0) {
      row.mean = acc.mean();
      row.bias = row.mean - result.truth;
      row.variance = acc.variance();
      row.mse = sq_err / static_cast<double>(row.n_ok);
      if (with_ci > 0)
        row.coverage = static_cast<double>(covered) / static_cast<double>(with_ci);
      const double sd = std::sqrt(row.variance);
      if (row.n_ok > 1 && sd > 0.0) {
        for (double& v : estimates) v = (v - row.mean) / sd;
        row.ks = ks_statistic(estimates);
      }
    }
    result.summary.push_back(std::move(row));
  }
  return result;
}

namespace {

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string opt_cell(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << content;
  if (!out) throw IoError("failed writing '" + path + "'");
}

std::string replications_csv(const MonteCarloResult& result) {
  std::ostringstream os;
  os << "rep,estimator,estimate,sigma2_hat,ci_lower,ci_upper,covered,seed\n";
  for (const RepRecord& r : result.replications) {
    os << r.rep << ',' << r.estimator << ',';
    os << (r.ok ? format_double(r.estimate) : std::string()) << ',';
    os << opt_cell(r.sigma2_hat) << ',' << opt_cell(r.ci_lower) << ',' << opt_cell(r.ci_upper)
       << ',';
    if (r.covered) os << (*r.covered ? '1' : '0');
    os << ',' << r.seed << '\n';
  }
  return os.str();
}

std::string summary_csv(const MonteCarloResult& result) {
  std::ostringstream os;
  os << "estimator,mean,bias,variance,mse,coverage,ks,n_ok,n_fail\n";
  for (const SummaryRow& s : result.summary) {
    os << s.estimator << ',';
    if (s.n_ok > 0)
      os << format_double(s.mean) << ',' << format_double(s.bias) << ','
         << format_double(s.variance) << ',' << format_double(s.mse) << ',';
    else
      os << ",,,,";
    os << opt_cell(s.coverage) << ',' << opt_cell(s.ks) << ',' << s.n_ok << ',' << s.n_fail
       << '\n';
  }
  return os.str();
}

}  // namespace

void emit(const MonteCarloResult& result, const std::string& path_prefix, EmitFormat format) {
  if (format == EmitFormat::csv) {
    write_file(path_prefix + "_replications.csv", replications_csv(result));
    write_file(path_prefix + "_summary.csv", summary_csv(result));
    return;
  }

  nlohmann::json doc;
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  doc["meta"]["generated_at"] = stamp;
  if (!result.config_echo.empty()) {
    doc["config"] = nlohmann::json::parse(result.config_echo, nullptr, false);
    if (doc["config"].is_discarded()) doc["config"] = result.config_echo;
  } else {
    doc["config"] = nlohmann::json::object();
  }
  doc["truth"] = result.truth;
  doc["truth_se"] = result.truth_se;

  nlohmann::json reps = nlohmann::json::array();
  for (const RepRecord& r : result.replications) {
    nlohmann::json row;
    row["rep"] = r.rep;
    row["estimator"] = r.estimator;
    row["seed"] = r.seed;
    if (r.ok) {
      row["estimate"] = r.estimate;
      if (r.sigma2_hat) row["sigma2_hat"] = *r.sigma2_hat;
      if (r.ci_lower) row["ci_lower"] = *r.ci_lower;
      if (r.ci_upper) row["ci_upper"] = *r.ci_upper;
      if (r.covered) row["covered"] = *r.covered;
    } else {
      row["error"] = r.error;
    }
    reps.push_back(std::move(row));
  }
  doc["replications"] = std::move(reps);

  nlohmann::json summary = nlohmann::json::array();
  for (const SummaryRow& s : result.summary) {
    nlohmann::json row;
    row["estimator"] = s.estimator;
    row["n_ok"] = s.n_ok;
    row["n_fail"] = s.n_fail;
    if (s.n_ok > 0) {
      row["mean"] = s.mean;
      row["bias"] = s.bias;
      row["variance"] = s.variance;
      row["mse"] = s.mse;
      if (s.coverage) row["coverage"] = *s.coverage;
      if (s.ks) row["ks"] = *s.ks;
    }
    summary.push_back(std::move(row));
  }
  doc["summary"] = std::move(summary);

  write_file(path_prefix + ".json", doc.dump(2) + "\n");
}

}  // namespace wshift
