// Command-line driver: estimation on CSV data, Monte Carlo simulation,
// closed-form-vs-oracle verification, efficiency-bound evaluation, and the
// masked-missingness semi-real experiment.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wshift/baselines.hpp"
#include "wshift/core.hpp"
#include "wshift/dataset_io.hpp"
#include "wshift/dgp.hpp"
#include "wshift/estimators_cs.hpp"
#include "wshift/estimators_md.hpp"
#include "wshift/ot_oracle.hpp"
#include "wshift/rng.hpp"
#include "wshift/run_config.hpp"
#include "wshift/simbench.hpp"

namespace {

using namespace wshift;

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitInputError = 2;
constexpr int kExitEstimatorFailure = 3;

std::string format_double(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", v);
  return buffer;
}

std::string format_short(double v) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.6g", v);
  return buffer;
}

void write_output(const std::optional<std::string>& path, const std::string& content) {
  if (!path) {
    std::cout << content;
    return;
  }
  std::ofstream out(*path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + *path + "' for writing");
  out << content;
}

std::vector<std::string> split_list(const std::string& csv) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(csv);
  while (std::getline(is, item, ','))
    if (!item.empty()) out.push_back(item);
  return out;
}

std::size_t default_workers(std::size_t flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("WSHIFT_WORKERS")) {
    const long v = std::atol(env);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return 0;  // library picks hardware concurrency
}

EmitFormat parse_format(const std::string& name) {
  if (name == "csv") return EmitFormat::csv;
  if (name == "json") return EmitFormat::json;
  throw ConfigError("unknown format '" + name + "' (expected csv or json)");
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateRow {
  std::string method;
  bool ok = false;
  std::string error;
  EstimatorOutcome outcome;
};

struct EstimateOptions {
  std::string source_csv;
  std::string target_csv;
  std::string missing_csv;
  std::string response = "y";
  std::string g_id = "response";
  std::string methods = "w_v";
  std::string regressor = "ols";
  std::string config_path;
  std::uint64_t seed = 1;
  double level = 0.95;
  std::optional<std::string> out;
  std::string format = "csv";
};

std::string estimate_rows_csv(const std::vector<EstimateRow>& rows, double level,
                              std::size_t n, std::size_t m) {
  std::ostringstream os;
  os << "method,estimate,sigma2_hat,stderr,ci_lower,ci_upper,level,n,m\n";
  for (const auto& row : rows) {
    os << row.method << ',';
    if (row.ok) {
      os << format_double(row.outcome.estimate) << ',';
      os << (row.outcome.sigma2_hat ? format_double(*row.outcome.sigma2_hat) : "") << ',';
      os << (row.outcome.stderr_hat ? format_double(*row.outcome.stderr_hat) : "") << ',';
      os << (row.outcome.ci_lower ? format_double(*row.outcome.ci_lower) : "") << ',';
      os << (row.outcome.ci_upper ? format_double(*row.outcome.ci_upper) : "") << ',';
    } else {
      os << ",,,,,";
    }
    os << format_double(level) << ',' << n << ',' << m << '\n';
  }
  return os.str();
}

std::string estimate_rows_json(const std::vector<EstimateRow>& rows, double level,
                               std::size_t n, std::size_t m) {
  nlohmann::json doc = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r;
    r["method"] = row.method;
    r["level"] = level;
    r["n"] = n;
    r["m"] = m;
    if (row.ok) {
      r["estimate"] = row.outcome.estimate;
      if (row.outcome.sigma2_hat) r["sigma2_hat"] = *row.outcome.sigma2_hat;
      if (row.outcome.stderr_hat) r["stderr"] = *row.outcome.stderr_hat;
      if (row.outcome.ci_lower) r["ci_lower"] = *row.outcome.ci_lower;
      if (row.outcome.ci_upper) r["ci_upper"] = *row.outcome.ci_upper;
    } else {
      r["error"] = row.error;
    }
    doc.push_back(std::move(r));
  }
  return doc.dump(2) + "\n";
}

int cmd_estimate(const EstimateOptions& opts) {
  const bool missing_mode = !opts.missing_csv.empty();
  if (missing_mode && (!opts.source_csv.empty() || !opts.target_csv.empty())) {
    std::cerr << "estimate: pass either --source and --target, or --missing\n";
    return kExitInputError;
  }
  if (!missing_mode && (opts.source_csv.empty() || opts.target_csv.empty())) {
    std::cerr << "estimate: covariate-shift mode needs both --source and --target\n";
    return kExitInputError;
  }

  const Functional g = parse_functional(opts.g_id);
  EstimatorSpec base_spec;
  base_spec.regressor.kind = parse_regressor_kind(opts.regressor);
  if (!opts.config_path.empty()) {
    // The config carries one estimator-spec object whose hyperparameters are
    // the defaults for every requested method; flags still pick the roster.
    base_spec = parse_estimator_spec_json(read_text_file(opts.config_path));
  }

  SourceDataset src;
  TargetDataset tgt;
  MissingDataset md;
  std::size_t n = 0;
  std::size_t m = 0;
  if (missing_mode) {
    md = table_to_missing(read_csv(opts.missing_csv), opts.response);
    validate_missing(md);
    if (md.n_complete() == 0) throw NoCompleteCases("every response cell is empty");
    n = md.n_complete();
    m = md.N() - n;
  } else {
    const CsvTable src_table = read_csv(opts.source_csv);
    src = table_to_source(src_table, opts.response);
    tgt = table_to_target(read_csv(opts.target_csv), covariate_columns(src_table, opts.response));
    validate_pair(src, tgt);
    n = src.n();
    m = tgt.m();
  }

  std::vector<EstimateRow> rows;
  bool any_failed = false;
  for (const std::string& method : split_list(opts.methods)) {
    EstimateRow row;
    row.method = method;
    EstimatorSpec spec = base_spec;
    spec.name = method;
    const std::uint64_t est_seed = estimator_stream_seed(opts.seed, 1, method);
    try {
      row.outcome = missing_mode ? run_estimator_md(spec, md, g, opts.level, est_seed)
                                 : run_estimator_cs(spec, src, tgt, g, opts.level, est_seed);
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
      any_failed = true;
      std::cerr << "estimate: method '" << method << "' failed: " << e.what() << "\n";
    }
    rows.push_back(std::move(row));
  }

  const std::string content = parse_format(opts.format) == EmitFormat::csv
                                  ? estimate_rows_csv(rows, opts.level, n, m)
                                  : estimate_rows_json(rows, opts.level, n, m);
  write_output(opts.out, content);
  return any_failed ? kExitEstimatorFailure : kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateOptions {
  std::string config_path;
  std::size_t workers = 0;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<std::string> format;
};

void print_summary_table(const MonteCarloResult& result, const std::string& heading) {
  std::cout << heading << "\n";
  std::cout << "  truth " << format_short(result.truth) << " (se "
            << format_short(result.truth_se) << ")\n";
  std::printf("  %-8s %12s %12s %12s %12s %9s %8s %5s %6s\n", "est", "mean", "bias", "variance",
              "mse", "coverage", "ks", "ok", "fail");
  for (const SummaryRow& s : result.summary) {
    std::printf("  %-8s %12s %12s %12s %12s %9s %8s %5zu %6zu\n", s.estimator.c_str(),
                s.n_ok ? format_short(s.mean).c_str() : "-",
                s.n_ok ? format_short(s.bias).c_str() : "-",
                s.n_ok ? format_short(s.variance).c_str() : "-",
                s.n_ok ? format_short(s.mse).c_str() : "-",
                s.coverage ? format_short(*s.coverage).c_str() : "-",
                s.ks ? format_short(*s.ks).c_str() : "-", s.n_ok, s.n_fail);
  }
}

int cmd_simulate(const SimulateOptions& opts) {
  SimulateConfig config = parse_simulate_config(read_text_file(opts.config_path));
  if (opts.workers > 0) config.base.workers = opts.workers;
  config.base.workers = default_workers(config.base.workers);
  if (opts.seed) config.base.base_seed = *opts.seed;
  if (opts.out) config.out_path = *opts.out;
  if (opts.format) config.format = parse_format(*opts.format);

  for (const auto& [size_a, size_b] : config.sizes) {
    MonteCarloConfig run = config.base;
    std::string suffix;
    std::string heading;
    if (run.is_mar()) {
      run.N = size_a;
      heading = "N=" + std::to_string(size_a);
      if (config.sizes.size() > 1) suffix = "_N" + std::to_string(size_a);
    } else {
      run.n = size_a;
      run.m = size_b;
      heading = "n=" + std::to_string(size_a) + " m=" + std::to_string(size_b);
      if (config.sizes.size() > 1)
        suffix = "_n" + std::to_string(size_a) + "_m" + std::to_string(size_b);
    }
    MonteCarloResult result = run_monte_carlo(run);
    result.config_echo = config.echo;
    emit(result, config.out_path + suffix, config.format);
    print_summary_table(result, heading);
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyOptions {
  std::size_t instances = 200;
  std::size_t max_n = 6;
  std::size_t max_m = 4;
  std::size_t max_d = 3;
  std::uint64_t seed = 20260809;
  std::optional<std::string> out;
};

int cmd_verify(const VerifyOptions& opts) {
  std::size_t matched = 0;
  double worst_gap = 0.0;
  std::vector<std::string> failures;
  for (std::size_t k = 1; k <= opts.instances; ++k) {
    Rng rng(mix64(opts.seed, k));
    const std::size_t n = 1 + static_cast<std::size_t>(rng.below(opts.max_n));
    const std::size_t m = 1 + static_cast<std::size_t>(rng.below(opts.max_m));
    const std::size_t d = 1 + static_cast<std::size_t>(rng.below(opts.max_d));
    SourceDataset src;
    src.d = d;
    for (std::size_t i = 0; i < n; ++i) {
      LabeledSample s;
      for (std::size_t l = 0; l < d; ++l) s.x.push_back(rng.uniform());
      s.y = rng.uniform();
      src.samples.push_back(std::move(s));
    }
    TargetDataset tgt;
    tgt.d = d;
    for (std::size_t j = 0; j < m; ++j) {
      std::vector<double> x;
      for (std::size_t l = 0; l < d; ++l) x.push_back(rng.uniform());
      tgt.points.push_back(std::move(x));
    }
    const OracleReport report = verify_theorem1(src, tgt);
    worst_gap = std::max(worst_gap, report.gap);
    if (report.matched_closed_form)
      ++matched;
    else
      failures.push_back("instance " + std::to_string(k) + ": gap " +
                         format_double(report.gap));
  }

  std::ostringstream os;
  os << "instances: " << opts.instances << "\n";
  os << "matched: " << matched << "/" << opts.instances << "\n";
  os << "worst_gap: " << format_double(worst_gap) << "\n";
  for (const auto& f : failures) os << "FAILED " << f << "\n";
  write_output(opts.out, os.str());
  return matched == opts.instances ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------
// bound

int cmd_bound(const std::string& config_path, const std::optional<std::string>& out) {
  const BoundConfig config = parse_bound_config(read_text_file(config_path));
  const Functional g = parse_functional(config.g_id);
  const BoundReport report = efficiency_bound(config.dgp, g, config.eta, config.draws,
                                              config.seed, config.force_unit_ratio);
  std::ostringstream os;
  os << "sigma2_eff: " << format_double(report.sigma2_eff.value) << " (se "
     << format_double(report.sigma2_eff.se) << ")\n";
  os << "sigma2_w: " << format_double(report.sigma2_w.value) << " (se "
     << format_double(report.sigma2_w.se) << ")\n";
  os << "difference: " << format_double(report.difference.value) << " (se "
     << format_double(report.difference.se) << ")\n";
  write_output(out, os.str());
  return kExitOk;
}

// ---------------------------------------------------------------------------
// mar-mask

struct MarMaskOptions {
  std::string data_csv;
  std::string response;
  std::string prop_covariate;
  std::string covariates;  // comma list; empty = all non-response columns
  std::string propensity = "one_minus_expit_sq";
  std::string methods = "naive,pl,ipw,aipw,dml,w_v,w_s";
  std::string regressor = "ols";
  std::size_t N = 6000;
  std::size_t R = 100;
  std::uint64_t seed = 1;
  double level = 0.95;
  std::optional<std::string> out;
  std::string format = "csv";
};

double expit(double t) { return 1.0 / (1.0 + std::exp(-t)); }

int cmd_mar_mask(const MarMaskOptions& opts) {
  const CsvTable table = read_csv(opts.data_csv);
  if (table.rows.size() < opts.N)
    throw IoError("N=" + std::to_string(opts.N) + " exceeds the file's " +
                  std::to_string(table.rows.size()) + " data rows");
  const std::size_t resp_col = table.column(opts.response);
  const std::size_t prop_col = table.column(opts.prop_covariate);

  const std::vector<std::string> model_cols = opts.covariates.empty()
                                                  ? covariate_columns(table, opts.response)
                                                  : split_list(opts.covariates);
  std::vector<std::size_t> model_idx;
  for (const auto& name : model_cols) model_idx.push_back(table.column(name));

  // Parse the needed numeric columns once.
  const std::size_t rows = table.rows.size();
  std::vector<double> response(rows), prop(rows);
  std::vector<std::vector<double>> X(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    auto cell = [&](std::size_t c) {
      const std::string& s = table.rows[r][c];
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size())
        throw IoError("row " + std::to_string(r + 2) + ", column '" + table.header[c] +
                      "': cell '" + s + "' is not numeric");
      return v;
    };
    response[r] = cell(resp_col);
    prop[r] = cell(prop_col);
    X[r].reserve(model_idx.size());
    for (std::size_t c : model_idx) X[r].push_back(cell(c));
  }

  const double truth = std::accumulate(response.begin(), response.end(), 0.0) /
                       static_cast<double>(rows);
  const Functional g = response_functional();
  const bool saturate = opts.propensity == "none";
  if (!saturate && opts.propensity != "one_minus_expit_sq")
    throw ConfigError("unknown propensity id '" + opts.propensity +
                      "' (expected one_minus_expit_sq or none)");

  const std::vector<std::string> methods = split_list(opts.methods);
  EstimatorSpec base_spec;
  base_spec.regressor.kind = parse_regressor_kind(opts.regressor);

  struct Cell {
    bool ok = false;
    double estimate = 0.0;
    double sq_err = 0.0;
    std::string error;
  };
  std::vector<std::vector<Cell>> grid(opts.R, std::vector<Cell>(methods.size()));

  std::vector<std::size_t> order(rows);
  for (std::size_t rep = 1; rep <= opts.R; ++rep) {
    Rng rng(mix64(mix64(opts.seed, rep), fnv1a64("mar-mask")));
    std::iota(order.begin(), order.end(), std::size_t{0});
    for (std::size_t i = 0; i < opts.N; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng.below(rows - i));
      std::swap(order[i], order[j]);
    }

    // Z-score the designated covariate within the drawn subsample.
    double mean = 0.0;
    for (std::size_t i = 0; i < opts.N; ++i) mean += prop[order[i]];
    mean /= static_cast<double>(opts.N);
    double var = 0.0;
    for (std::size_t i = 0; i < opts.N; ++i) {
      const double dlt = prop[order[i]] - mean;
      var += dlt * dlt;
    }
    var /= static_cast<double>(opts.N);
    if (var <= 0.0)
      throw ConfigError("the propensity covariate is constant within the drawn sample");
    const double sd = std::sqrt(var);

    MissingDataset md;
    md.d = model_idx.size();
    md.rows.reserve(opts.N);
    for (std::size_t i = 0; i < opts.N; ++i) {
      const std::size_t row = order[i];
      MissingRow mr;
      mr.x = X[row];
      const double z = (prop[row] - mean) / sd;
      const double pi = saturate ? 1.0 : 1.0 - expit(z * z - 1.0);
      if (rng.bernoulli(pi)) mr.y = response[row];
      md.rows.push_back(std::move(mr));
    }

    for (std::size_t e = 0; e < methods.size(); ++e) {
      EstimatorSpec spec = base_spec;
      spec.name = methods[e];
      Cell& cell = grid[rep - 1][e];
      try {
        const EstimatorOutcome outcome = run_estimator_md(
            spec, md, g, opts.level, estimator_stream_seed(opts.seed, rep, spec.name));
        cell.ok = true;
        cell.estimate = outcome.estimate;
        const double err = outcome.estimate - truth;
        cell.sq_err = err * err;
      } catch (const std::exception& ex) {
        cell.error = ex.what();
      }
    }
  }

  // Summaries: mean and standard deviation of the squared errors.
  struct Summary {
    std::string method;
    std::size_t n_ok = 0;
    std::size_t n_fail = 0;
    double se_mean = 0.0;
    double se_sd = 0.0;
  };
  std::vector<Summary> summaries;
  for (std::size_t e = 0; e < methods.size(); ++e) {
    Summary s;
    s.method = methods[e];
    double acc = 0.0;
    for (std::size_t rep = 0; rep < opts.R; ++rep) {
      if (!grid[rep][e].ok) {
        ++s.n_fail;
        continue;
      }
      ++s.n_ok;
      acc += grid[rep][e].sq_err;
    }
    if (s.n_ok > 0) {
      s.se_mean = acc / static_cast<double>(s.n_ok);
      double ss = 0.0;
      for (std::size_t rep = 0; rep < opts.R; ++rep)
        if (grid[rep][e].ok) {
          const double dlt = grid[rep][e].sq_err - s.se_mean;
          ss += dlt * dlt;
        }
      s.se_sd = s.n_ok > 1 ? std::sqrt(ss / static_cast<double>(s.n_ok - 1)) : 0.0;
    }
    summaries.push_back(std::move(s));
  }

  if (parse_format(opts.format) == EmitFormat::csv) {
    std::ostringstream reps;
    reps << "rep,estimator,estimate,sq_err\n";
    for (std::size_t rep = 0; rep < opts.R; ++rep)
      for (std::size_t e = 0; e < methods.size(); ++e) {
        const Cell& cell = grid[rep][e];
        reps << rep + 1 << ',' << methods[e] << ',';
        if (cell.ok)
          reps << format_double(cell.estimate) << ',' << format_double(cell.sq_err);
        else
          reps << ',';
        reps << '\n';
      }
    std::ostringstream summary;
    summary << "estimator,se_mean,se_sd,n_ok,n_fail\n";
    for (const auto& s : summaries)
      summary << s.method << ',' << format_double(s.se_mean) << ',' << format_double(s.se_sd)
              << ',' << s.n_ok << ',' << s.n_fail << '\n';
    if (opts.out) {
      write_output(*opts.out + "_reps.csv", reps.str());
      write_output(*opts.out + "_summary.csv", summary.str());
    } else {
      std::cout << summary.str();
    }
  } else {
    nlohmann::json doc;
    doc["truth"] = truth;
    doc["N"] = opts.N;
    doc["R"] = opts.R;
    nlohmann::json jreps = nlohmann::json::array();
    for (std::size_t rep = 0; rep < opts.R; ++rep)
      for (std::size_t e = 0; e < methods.size(); ++e) {
        const Cell& cell = grid[rep][e];
        nlohmann::json row;
        row["rep"] = rep + 1;
        row["estimator"] = methods[e];
        if (cell.ok) {
          row["estimate"] = cell.estimate;
          row["sq_err"] = cell.sq_err;
        } else {
          row["error"] = cell.error;
        }
        jreps.push_back(std::move(row));
      }
    doc["replications"] = std::move(jreps);
    nlohmann::json jsummary = nlohmann::json::array();
    for (const auto& s : summaries) {
      nlohmann::json row;
      row["estimator"] = s.method;
      row["se_mean"] = s.se_mean;
      row["se_sd"] = s.se_sd;
      row["n_ok"] = s.n_ok;
      row["n_fail"] = s.n_fail;
      jsummary.push_back(std::move(row));
    }
    doc["summary"] = std::move(jsummary);
    write_output(opts.out ? std::optional<std::string>(*opts.out + ".json") : std::nullopt,
                 doc.dump(2) + "\n");
  }

  std::cerr << "mar-mask: truth " << format_short(truth) << ", " << opts.R << " repetitions\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Minimum-Wasserstein estimation toolkit"};
  app.require_subcommand(1);

  EstimateOptions est;
  auto* estimate = app.add_subcommand("estimate", "Estimate the target mean of g from CSV data");
  estimate->add_option("--source", est.source_csv, "Labeled source CSV");
  estimate->add_option("--target", est.target_csv, "Covariate-only target CSV");
  estimate->add_option("--missing", est.missing_csv, "CSV with missing response cells");
  estimate->add_option("--response", est.response, "Response column name (default y)");
  estimate->add_option("--g", est.g_id, "Functional: response or xk_times_y:<k>");
  estimate->add_option("--methods", est.methods, "Comma list of estimators");
  estimate->add_option("--regressor", est.regressor, "Default regressor kind");
  estimate->add_option("--config", est.config_path, "Estimator hyperparameter JSON");
  estimate->add_option("--seed", est.seed, "Seed for split-based estimators");
  estimate->add_option("--level", est.level, "Confidence level");
  std::string est_out;
  estimate->add_option("--out", est_out, "Output file (default stdout)");
  estimate->add_option("--format", est.format, "csv or json");

  SimulateOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Run a Monte Carlo experiment");
  simulate->add_option("config", sim.config_path, "Experiment config JSON")->required();
  simulate->add_option("--workers", sim.workers, "Worker threads (0 = auto)");
  std::uint64_t sim_seed = 0;
  auto* sim_seed_opt = simulate->add_option("--seed", sim_seed, "Override base_seed");
  std::string sim_out;
  auto* sim_out_opt = simulate->add_option("--out", sim_out, "Override output path prefix");
  std::string sim_format;
  auto* sim_format_opt = simulate->add_option("--format", sim_format, "Override output format");

  VerifyOptions ver;
  auto* verify = app.add_subcommand("verify", "Check the closed form against the exact oracle");
  verify->add_option("--instances", ver.instances, "Number of random instances");
  verify->add_option("--max-n", ver.max_n, "Maximum source size");
  verify->add_option("--max-m", ver.max_m, "Maximum target size");
  verify->add_option("--max-d", ver.max_d, "Maximum dimension");
  verify->add_option("--seed", ver.seed, "Instance seed");
  std::string ver_out;
  verify->add_option("--out", ver_out, "Output file (default stdout)");

  std::string bound_config;
  std::string bound_out;
  auto* bound = app.add_subcommand("bound", "Efficiency lower bound vs the W-variance");
  bound->add_option("config", bound_config, "Bound config JSON")->required();
  bound->add_option("--out", bound_out, "Output file (default stdout)");

  MarMaskOptions mar;
  auto* mar_mask = app.add_subcommand("mar-mask", "Masked-missingness experiment on a CSV");
  mar_mask->add_option("data", mar.data_csv, "Full CSV dataset")->required();
  mar_mask->add_option("--response", mar.response, "Response column")->required();
  mar_mask
      ->add_option("--prop-covariate", mar.prop_covariate,
                   "Column driving the masking propensity")
      ->required();
  mar_mask->add_option("--covariates", mar.covariates, "Model covariate columns (comma list)");
  mar_mask->add_option("--propensity", mar.propensity, "one_minus_expit_sq or none");
  mar_mask->add_option("--methods", mar.methods, "Comma list of estimators");
  mar_mask->add_option("--regressor", mar.regressor, "Default regressor kind");
  mar_mask->add_option("--N", mar.N, "Subsample size per repetition");
  mar_mask->add_option("--R", mar.R, "Repetitions");
  mar_mask->add_option("--seed", mar.seed, "Seed");
  mar_mask->add_option("--level", mar.level, "Confidence level");
  std::string mar_out;
  mar_mask->add_option("--out", mar_out, "Output path prefix");
  mar_mask->add_option("--format", mar.format, "csv or json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*estimate) {
      if (!est_out.empty()) est.out = est_out;
      return cmd_estimate(est);
    }
    if (*simulate) {
      if (*sim_seed_opt) sim.seed = sim_seed;
      if (*sim_out_opt) sim.out = sim_out;
      if (*sim_format_opt) sim.format = sim_format;
      return cmd_simulate(sim);
    }
    if (*verify) {
      if (!ver_out.empty()) ver.out = ver_out;
      return cmd_verify(ver);
    }
    if (*bound)
      return cmd_bound(bound_config,
                       bound_out.empty() ? std::nullopt : std::optional<std::string>(bound_out));
    if (*mar_mask) {
      if (!mar_out.empty()) mar.out = mar_out;
      return cmd_mar_mask(mar);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
