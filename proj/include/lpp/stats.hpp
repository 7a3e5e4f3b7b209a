#pragma once

#include <cstddef>
#include <span>

namespace lpp::stats {

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

double mean(std::span<const double> x);
/// Unbiased sample variance (n - 1 denominator).
double variance(std::span<const double> x);
/// Unbiased sample covariance.
double covariance(std::span<const double> x, std::span<const double> y);

/// Mean with stderr = sd / sqrt(n).
Estimate mean_estimate(std::span<const double> x);

/// Sample covariance with a leave-one-out jackknife standard error.
/// Fewer than three samples give an infinite stderr.
Estimate jackknife_covariance(std::span<const double> x,
                              std::span<const double> y);

/// Sample variance with a leave-one-out jackknife standard error.
Estimate jackknife_variance(std::span<const double> x);

/// Var(x) / Var(y) over paired samples, with a jackknife stderr.
Estimate jackknife_variance_ratio(std::span<const double> x,
                                  std::span<const double> y);

/// Two-sided Kolmogorov-Smirnov statistic against a continuous cdf.
template <class Cdf>
double ks_statistic(std::span<const double> sorted, Cdf cdf);

}  // namespace lpp::stats

#include <algorithm>
#include <cmath>

template <class Cdf>
double lpp::stats::ks_statistic(std::span<const double> sorted, Cdf cdf) {
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const double f = cdf(sorted[i]);
    d = std::max({d, f - static_cast<double>(i) / n,
                  static_cast<double>(i + 1) / n - f});
  }
  return d;
}
