#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace wshift {

/// splitmix64 finalizer (Steele, Lea & Flood 2014): full-avalanche 64-bit
/// mixer used for all seed derivation in the project.
std::uint64_t mix64(std::uint64_t x) noexcept;

/// Combines two words through the same mixer; mix64(a, b) != mix64(b, a).
std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept;

/// FNV-1a hash of a string, used to derive per-estimator seed streams from
/// estimator names so a roster change never perturbs other streams.
std::uint64_t fnv1a64(std::string_view s) noexcept;

/// Deterministic sampler on top of std::mt19937_64. The engine's output
/// sequence is fixed by the C++ standard; none of the std::* distributions
/// are used, so every draw below is reproducible from the seed alone.
///
/// Transforms:
///   uniform   u = (next() >> 11) * 2^-53                        in [0, 1)
///   normal    Box-Muller, z = sqrt(-2 ln u1) * cos(2 pi u2)
///   gamma     Marsaglia-Tsang squeeze (2000); shape < 1 boosted via
///             Gamma(a) = Gamma(a+1) * U^(1/a)
///   beta      Gamma(a) / (Gamma(a) + Gamma(b))
///   below(k)  rejection sampling on the top of the 64-bit range (unbiased)
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1]; safe as a log() argument.
  double uniform_pos() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

  std::uint64_t below(std::uint64_t bound);

  double normal();
  double gamma(double shape);
  double beta(double a, double b);

  bool bernoulli(double prob) { return uniform() < prob; }

  /// Fisher-Yates shuffle.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace wshift
