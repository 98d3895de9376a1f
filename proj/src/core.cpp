#include "wshift/core.hpp"

#include <cmath>

namespace wshift {

std::size_t MissingDataset::n_complete() const {
  std::size_t n = 0;
  for (const auto& r : rows)
    if (r.observed()) ++n;
  return n;
}

Functional response_functional() {
  return Functional{[](std::span<const double>, double y) { return y; }, "response"};
}

Functional coordinate_product_functional(std::size_t k) {
  if (k == 0) throw ConfigError("coordinate index k is 1-based and must be >= 1");
  return Functional{[k](std::span<const double> x, double y) {
                      if (k > x.size())
                        throw DimensionMismatch("functional coordinate index exceeds dimension");
                      return x[k - 1] * y;
                    },
                    "xk_times_y:" + std::to_string(k)};
}

Functional parse_functional(const std::string& id) {
  if (id == "response") return response_functional();
  const std::string prefix = "xk_times_y:";
  if (id.rfind(prefix, 0) == 0) {
    std::size_t k = 0;
    try {
      k = static_cast<std::size_t>(std::stoul(id.substr(prefix.size())));
    } catch (const std::exception&) {
      throw ConfigError("bad coordinate index in functional id '" + id + "'");
    }
    return coordinate_product_functional(k);
  }
  throw ConfigError("unknown functional id '" + id + "' (expected response or xk_times_y:<k>)");
}

namespace {

bool all_finite(std::span<const double> v) {
  for (double t : v)
    if (!std::isfinite(t)) return false;
  return true;
}

}  // namespace

void validate_pair(const SourceDataset& src, const TargetDataset& tgt) {
  if (src.samples.empty()) throw EmptyDataset("source dataset is empty");
  if (tgt.points.empty()) throw EmptyDataset("target dataset is empty");
  if (src.d != tgt.d)
    throw DimensionMismatch("source dimension " + std::to_string(src.d) +
                            " != target dimension " + std::to_string(tgt.d));
  for (std::size_t i = 0; i < src.samples.size(); ++i) {
    const auto& s = src.samples[i];
    if (s.x.size() != src.d)
      throw DimensionMismatch("source sample " + std::to_string(i) + " has dimension " +
                              std::to_string(s.x.size()));
    if (!all_finite(s.x) || !std::isfinite(s.y))
      throw NonFiniteValue("source sample " + std::to_string(i) + " contains a non-finite value");
  }
  for (std::size_t j = 0; j < tgt.points.size(); ++j) {
    const auto& p = tgt.points[j];
    if (p.size() != tgt.d)
      throw DimensionMismatch("target point " + std::to_string(j) + " has dimension " +
                              std::to_string(p.size()));
    if (!all_finite(p))
      throw NonFiniteValue("target point " + std::to_string(j) + " contains a non-finite value");
  }
}

void validate_missing(const MissingDataset& md) {
  if (md.rows.empty()) throw EmptyDataset("missing-data set is empty");
  for (std::size_t i = 0; i < md.rows.size(); ++i) {
    const auto& r = md.rows[i];
    if (r.x.size() != md.d)
      throw DimensionMismatch("row " + std::to_string(i) + " has dimension " +
                              std::to_string(r.x.size()));
    if (!all_finite(r.x) || (r.y && !std::isfinite(*r.y)))
      throw NonFiniteValue("row " + std::to_string(i) + " contains a non-finite value");
  }
}

std::pair<SourceDataset, TargetDataset> split_missing(const MissingDataset& md) {
  validate_missing(md);
  SourceDataset src;
  TargetDataset tgt;
  src.d = md.d;
  tgt.d = md.d;
  for (const auto& r : md.rows) {
    if (r.observed())
      src.samples.push_back({r.x, *r.y});
    else
      tgt.points.push_back(r.x);
  }
  if (src.samples.empty()) throw NoCompleteCases("every response is missing");
  return {std::move(src), std::move(tgt)};
}

}  // namespace wshift
