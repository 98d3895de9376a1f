#pragma once

#include <cstddef>
#include <span>

namespace wshift {

/// Standard normal CDF.
double normal_cdf(double t);

/// Standard normal inverse CDF, Wichura's AS 241 (PPND16) rational
/// approximation; absolute error below 1e-15 on (0, 1).
double normal_quantile(double p);

/// Two-sided Kolmogorov-Smirnov distance between the empirical CDF of an
/// (already standardized) sample and the standard normal CDF.
double ks_statistic(std::span<const double> standardized);

/// Streaming mean/variance accumulator (Welford).
class Welford {
 public:
  void add(double x) {
    ++count_;
    const double delta = x - mean_;
    mean_ += delta / static_cast<double>(count_);
    m2_ += delta * (x - mean_);
  }

  std::size_t count() const { return count_; }
  double mean() const { return mean_; }
  /// Population variance (divides by count).
  double variance() const { return count_ ? m2_ / static_cast<double>(count_) : 0.0; }
  double variance_sample() const {
    return count_ > 1 ? m2_ / static_cast<double>(count_ - 1) : 0.0;
  }
  /// Standard error of the accumulated mean.
  double se_of_mean() const;

 private:
  std::size_t count_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

}  // namespace wshift
