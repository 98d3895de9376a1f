#include "wshift/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace wshift {

namespace {

using nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (const auto& [key, value] : obj.items()) {
    (void)value;
    if (key != "notes" && !allowed.count(key))
      throw ConfigError(context + ": unknown key '" + key + "'");
  }
}

double get_number(const json& obj, const std::string& key, const std::string& context,
                  double fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(context + ": missing required key '" + key + "'");
    return fallback;
  }
  if (!obj[key].is_number()) throw ConfigError(context + "." + key + ": expected a number");
  return obj[key].get<double>();
}

std::size_t get_size(const json& obj, const std::string& key, const std::string& context,
                     std::size_t fallback, bool required = false) {
  const double v = get_number(obj, key, context, static_cast<double>(fallback), required);
  if (v < 0) throw ConfigError(context + "." + key + ": must be nonnegative");
  return static_cast<std::size_t>(v);
}

std::string get_string(const json& obj, const std::string& key, const std::string& context,
                       const std::string& fallback, bool required = false) {
  if (!obj.contains(key)) {
    if (required) throw ConfigError(context + ": missing required key '" + key + "'");
    return fallback;
  }
  if (!obj[key].is_string()) throw ConfigError(context + "." + key + ": expected a string");
  return obj[key].get<std::string>();
}

std::vector<double> get_vector(const json& obj, const std::string& key,
                               const std::string& context) {
  if (!obj.contains(key)) return {};
  if (!obj[key].is_array()) throw ConfigError(context + "." + key + ": expected an array");
  std::vector<double> out;
  for (const auto& v : obj[key]) {
    if (!v.is_number()) throw ConfigError(context + "." + key + ": expected numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

DistSpec parse_dist(const json& obj, const std::string& context) {
  check_keys(obj, {"dist", "a", "b", "mean", "sd"}, context);
  DistSpec spec;
  const std::string kind = get_string(obj, "dist", context, "", true);
  if (kind == "beta") {
    spec.kind = DistSpec::Kind::beta;
    spec.beta_a = get_number(obj, "a", context, 2.0, true);
    spec.beta_b = get_number(obj, "b", context, 3.0, true);
    if (spec.beta_a <= 0 || spec.beta_b <= 0)
      throw ConfigError(context + ": beta parameters must be positive");
  } else if (kind == "gaussian") {
    spec.kind = DistSpec::Kind::gaussian;
    spec.mean = get_vector(obj, "mean", context);
    spec.sd = get_number(obj, "sd", context, 1.0, true);
    if (spec.sd <= 0) throw ConfigError(context + ": gaussian sd must be positive");
  } else {
    throw ConfigError(context + ".dist: expected 'beta' or 'gaussian'");
  }
  return spec;
}

CovariateShiftDGP parse_cs_dgp(const json& obj) {
  check_keys(obj, {"kind", "d", "source", "target", "f", "noise_sd"}, "dgp");
  CovariateShiftDGP dgp;
  dgp.d = get_size(obj, "d", "dgp", 2);
  if (dgp.d < 2) throw ConfigError("dgp.d: covariate-shift DGPs need d >= 2");
  if (!obj.contains("source") || !obj.contains("target"))
    throw ConfigError("dgp: covariate_shift needs 'source' and 'target'");
  dgp.source = parse_dist(obj["source"], "dgp.source");
  dgp.target = parse_dist(obj["target"], "dgp.target");
  dgp.f = parse_regression_function(get_string(obj, "f", "dgp", "logsum"));
  dgp.noise_sd = get_number(obj, "noise_sd", "dgp", 0.1);
  if (dgp.noise_sd <= 0) throw ConfigError("dgp.noise_sd must be positive");
  return dgp;
}

MARDGP parse_mar_dgp(const json& obj) {
  check_keys(obj, {"kind", "d", "covariates", "outcome", "propensity"}, "dgp");
  MARDGP dgp;
  dgp.d = get_size(obj, "d", "dgp", 2);
  if (!obj.contains("covariates")) throw ConfigError("dgp: mar needs 'covariates'");
  dgp.covariates = parse_dist(obj["covariates"], "dgp.covariates");
  if (obj.contains("outcome")) {
    const json& oc = obj["outcome"];
    check_keys(oc, {"intercept", "coef", "noise_sd"}, "dgp.outcome");
    dgp.outcome_intercept = get_number(oc, "intercept", "dgp.outcome", 1.0);
    dgp.outcome_coef = get_vector(oc, "coef", "dgp.outcome");
    dgp.noise_sd = get_number(oc, "noise_sd", "dgp.outcome", 0.1);
  }
  if (obj.contains("propensity")) {
    const json& pr = obj["propensity"];
    check_keys(pr, {"intercept", "coef"}, "dgp.propensity");
    dgp.propensity_intercept = get_number(pr, "intercept", "dgp.propensity", 0.5);
    dgp.propensity_coef = get_vector(pr, "coef", "dgp.propensity");
  }
  return dgp;
}

RegressorSpec parse_regressor(const json& obj, const std::string& context) {
  check_keys(obj, {"kind", "lambda", "k", "rounds", "learning_rate", "min_leaf"}, context);
  RegressorSpec spec;
  spec.kind = parse_regressor_kind(get_string(obj, "kind", context, "ols"));
  spec.lambda = get_number(obj, "lambda", context, spec.lambda);
  spec.k = get_size(obj, "k", context, spec.k);
  spec.rounds = get_size(obj, "rounds", context, spec.rounds);
  spec.learning_rate = get_number(obj, "learning_rate", context, spec.learning_rate);
  spec.min_leaf = get_size(obj, "min_leaf", context, spec.min_leaf);
  spec.validate();
  return spec;
}

EstimatorSpec parse_estimator(const json& obj, const std::string& context) {
  check_keys(obj, {"name", "regressor", "propensity", "kliep", "discriminative", "hajek"},
             context);
  EstimatorSpec spec;
  spec.name = get_string(obj, "name", context, "", true);
  if (obj.contains("regressor")) spec.regressor = parse_regressor(obj["regressor"], context + ".regressor");
  if (obj.contains("propensity")) {
    const json& pr = obj["propensity"];
    check_keys(pr, {"lambda", "max_iter", "tol"}, context + ".propensity");
    spec.propensity.lambda = get_number(pr, "lambda", context, spec.propensity.lambda);
    spec.propensity.max_iter = get_size(pr, "max_iter", context, spec.propensity.max_iter);
    spec.propensity.tol = get_number(pr, "tol", context, spec.propensity.tol);
  }
  if (obj.contains("kliep")) {
    const json& kl = obj["kliep"];
    check_keys(kl, {"max_centers", "max_iter", "objective_tol", "clip_max"}, context + ".kliep");
    spec.kliep.max_centers = get_size(kl, "max_centers", context, spec.kliep.max_centers);
    spec.kliep.max_iter = get_size(kl, "max_iter", context, spec.kliep.max_iter);
    spec.kliep.objective_tol = get_number(kl, "objective_tol", context, spec.kliep.objective_tol);
    spec.kliep.clip_max = get_number(kl, "clip_max", context, spec.kliep.clip_max);
  }
  if (obj.contains("discriminative")) {
    const json& dc = obj["discriminative"];
    check_keys(dc, {"lambda", "max_iter", "tol", "clip_max"}, context + ".discriminative");
    spec.discriminative.logistic.lambda =
        get_number(dc, "lambda", context, spec.discriminative.logistic.lambda);
    spec.discriminative.logistic.max_iter =
        get_size(dc, "max_iter", context, spec.discriminative.logistic.max_iter);
    spec.discriminative.logistic.tol =
        get_number(dc, "tol", context, spec.discriminative.logistic.tol);
    spec.discriminative.clip_max = get_number(dc, "clip_max", context, spec.discriminative.clip_max);
  }
  if (obj.contains("hajek")) {
    if (!obj["hajek"].is_boolean()) throw ConfigError(context + ".hajek: expected a boolean");
    spec.hajek = obj["hajek"].get<bool>();
  }
  return spec;
}

std::vector<std::size_t> get_size_list(const json& obj, const std::string& key,
                                       const std::string& context) {
  std::vector<std::size_t> out;
  if (!obj.contains(key)) return out;
  const json& v = obj[key];
  if (v.is_number()) {
    out.push_back(v.get<std::size_t>());
  } else if (v.is_array()) {
    for (const auto& t : v) {
      if (!t.is_number()) throw ConfigError(context + "." + key + ": expected numbers");
      out.push_back(t.get<std::size_t>());
    }
  } else {
    throw ConfigError(context + "." + key + ": expected a number or an array of numbers");
  }
  return out;
}

json parse_document(const std::string& json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) throw ConfigError("config is not valid JSON");
  return doc;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

EstimatorSpec parse_estimator_spec_json(const std::string& json_text) {
  return parse_estimator(parse_document(json_text), "estimator");
}

SimulateConfig parse_simulate_config(const std::string& json_text) {
  const json doc = parse_document(json_text);
  check_keys(doc,
             {"mode", "dgp", "g", "n", "m", "N", "replications", "base_seed", "level",
              "truth_draws", "workers", "estimators", "output"},
             "config");
  const std::string mode = get_string(doc, "mode", "config", "simulate");
  if (mode != "simulate") throw ConfigError("config.mode: expected 'simulate'");
  if (!doc.contains("dgp")) throw ConfigError("config: missing 'dgp'");

  SimulateConfig config;
  config.echo = doc.dump();

  const std::string kind = get_string(doc["dgp"], "kind", "dgp", "", true);
  if (kind == "covariate_shift")
    config.base.dgp = parse_cs_dgp(doc["dgp"]);
  else if (kind == "mar")
    config.base.dgp = parse_mar_dgp(doc["dgp"]);
  else
    throw ConfigError("dgp.kind: expected 'covariate_shift' or 'mar'");

  config.base.g_id = get_string(doc, "g", "config", "response");
  config.base.replications = get_size(doc, "replications", "config", 1);
  config.base.base_seed = static_cast<std::uint64_t>(
      get_number(doc, "base_seed", "config", 0));
  config.base.level = get_number(doc, "level", "config", 0.95);
  config.base.truth_draws = get_size(doc, "truth_draws", "config", 10'000'000);
  config.base.workers = get_size(doc, "workers", "config", 0);

  if (!doc.contains("estimators") || !doc["estimators"].is_array() || doc["estimators"].empty())
    throw ConfigError("config.estimators: expected a non-empty array");
  std::size_t index = 0;
  for (const auto& e : doc["estimators"])
    config.base.estimators.push_back(
        parse_estimator(e, "estimators[" + std::to_string(index++) + "]"));

  const auto ns = get_size_list(doc, "n", "config");
  const auto ms = get_size_list(doc, "m", "config");
  const auto Ns = get_size_list(doc, "N", "config");
  if (config.base.is_mar()) {
    if (Ns.empty()) throw ConfigError("config: mar runs need 'N'");
    if (!ns.empty() || !ms.empty()) throw ConfigError("config: mar runs take 'N', not n/m");
    for (std::size_t N : Ns) config.sizes.emplace_back(N, 0);
  } else {
    if (ns.empty() || ms.empty()) throw ConfigError("config: covariate-shift runs need n and m");
    if (ns.size() != ms.size())
      throw ConfigError("config: n and m lists must have equal length");
    for (std::size_t k = 0; k < ns.size(); ++k) config.sizes.emplace_back(ns[k], ms[k]);
  }

  if (doc.contains("output")) {
    const json& out = doc["output"];
    check_keys(out, {"path", "format"}, "config.output");
    config.out_path = get_string(out, "path", "config.output", config.out_path);
    const std::string format = get_string(out, "format", "config.output", "csv");
    if (format == "csv")
      config.format = EmitFormat::csv;
    else if (format == "json")
      config.format = EmitFormat::json;
    else
      throw ConfigError("config.output.format: expected 'csv' or 'json'");
  }
  return config;
}

BoundConfig parse_bound_config(const std::string& json_text) {
  const json doc = parse_document(json_text);
  check_keys(doc, {"mode", "dgp", "g", "eta", "draws", "seed", "force_unit_ratio"}, "config");
  const std::string mode = get_string(doc, "mode", "config", "bound");
  if (mode != "bound") throw ConfigError("config.mode: expected 'bound'");
  if (!doc.contains("dgp")) throw ConfigError("config: missing 'dgp'");
  const std::string kind = get_string(doc["dgp"], "kind", "dgp", "covariate_shift");
  if (kind != "covariate_shift")
    throw ConfigError("bound mode supports covariate_shift DGPs only");

  BoundConfig config;
  config.dgp = parse_cs_dgp(doc["dgp"]);
  config.g_id = get_string(doc, "g", "config", "response");
  config.eta = get_number(doc, "eta", "config", 0.5);
  config.draws = get_size(doc, "draws", "config", config.draws);
  config.seed = static_cast<std::uint64_t>(get_number(doc, "seed", "config", 0));
  if (doc.contains("force_unit_ratio")) {
    if (!doc["force_unit_ratio"].is_boolean())
      throw ConfigError("config.force_unit_ratio: expected a boolean");
    config.force_unit_ratio = doc["force_unit_ratio"].get<bool>();
  }
  if (config.draws < 100'000) throw ConfigError("config.draws must be >= 1e5");
  return config;
}

}  // namespace wshift
