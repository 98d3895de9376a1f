#pragma once

#include <string>
#include <utility>
#include <vector>

#include "wshift/simbench.hpp"

namespace wshift {

/// A simulate-mode run: the shared Monte Carlo configuration plus the list of
/// sample sizes to sweep ((n, m) pairs for covariate shift, (N, 0) for
/// missing data; scalars in the JSON become one-element sweeps).
struct SimulateConfig {
  MonteCarloConfig base;
  std::vector<std::pair<std::size_t, std::size_t>> sizes;
  std::string out_path = "out";
  EmitFormat format = EmitFormat::csv;
  std::string echo;  // original JSON text, embedded in JSON outputs
};

struct BoundConfig {
  CovariateShiftDGP dgp;
  std::string g_id = "response";
  double eta = 0.5;
  std::size_t draws = 4'000'000;
  std::uint64_t seed = 0;
  bool force_unit_ratio = false;
};

/// Strict parsers: unknown keys are rejected ("notes" is allowed everywhere
/// as a documentation slot). Both throw ConfigError with the offending path.
SimulateConfig parse_simulate_config(const std::string& json_text);
BoundConfig parse_bound_config(const std::string& json_text);

/// Shared pieces, exposed for the estimate command's --config support.
EstimatorSpec parse_estimator_spec_json(const std::string& json_text);

std::string read_text_file(const std::string& path);

}  // namespace wshift
