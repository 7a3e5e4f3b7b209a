#include "lpp/stats.hpp"

#include <cassert>
#include <cmath>
#include <limits>
#include <vector>

namespace lpp::stats {

double mean(std::span<const double> x) {
  double s = 0.0;
  for (double v : x) s += v;
  return x.empty() ? 0.0 : s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) { return covariance(x, x); }

double covariance(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  const double mx = mean(x), my = mean(y);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += (x[i] - mx) * (y[i] - my);
  return s / static_cast<double>(n - 1);
}

Estimate mean_estimate(std::span<const double> x) {
  const double n = static_cast<double>(x.size());
  if (x.size() < 2) return {mean(x), std::numeric_limits<double>::infinity()};
  return {mean(x), std::sqrt(variance(x) / n)};
}

namespace {

struct LeaveOneOut {
  double full;
  std::vector<double> loo;
};

// Needs n >= 3.
LeaveOneOut loo_covariances(std::span<const double> x,
                            std::span<const double> y) {
  const std::size_t n = x.size();
  // Center first; leave-one-out sums then stay well conditioned.
  const double mx = mean(x), my = mean(y);
  std::vector<double> cx(n), cy(n);
  double sx = 0.0, sy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    cx[i] = x[i] - mx;
    cy[i] = y[i] - my;
    sx += cx[i];
    sy += cy[i];
    sxy += cx[i] * cy[i];
  }
  const double nd = static_cast<double>(n);
  LeaveOneOut out{(sxy - sx * sy / nd) / (nd - 1.0), std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const double ax = sx - cx[i], ay = sy - cy[i];
    out.loo[i] = (sxy - cx[i] * cy[i] - ax * ay / (nd - 1.0)) / (nd - 2.0);
  }
  return out;
}

double jackknife_error(const std::vector<double>& loo) {
  const double nd = static_cast<double>(loo.size());
  double m = 0.0;
  for (double v : loo) m += v;
  m /= nd;
  double ss = 0.0;
  for (double v : loo) ss += (v - m) * (v - m);
  return std::sqrt((nd - 1.0) / nd * ss);
}

}  // namespace

Estimate jackknife_covariance(std::span<const double> x,
                              std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  if (n < 3) {
    const double c = n == 2 ? covariance(x, y) : 0.0;
    return {c, std::numeric_limits<double>::infinity()};
  }
  const LeaveOneOut c = loo_covariances(x, y);
  return {c.full, jackknife_error(c.loo)};
}

Estimate jackknife_variance_ratio(std::span<const double> x,
                                  std::span<const double> y) {
  assert(x.size() == y.size());
  const std::size_t n = x.size();
  if (n < 3) {
    const double r = n == 2 ? variance(x) / variance(y) : 0.0;
    return {r, std::numeric_limits<double>::infinity()};
  }
  const LeaveOneOut vx = loo_covariances(x, x);
  const LeaveOneOut vy = loo_covariances(y, y);
  std::vector<double> ratio(n);
  for (std::size_t i = 0; i < n; ++i) ratio[i] = vx.loo[i] / vy.loo[i];
  return {vx.full / vy.full, jackknife_error(ratio)};
}

Estimate jackknife_variance(std::span<const double> x) {
  return jackknife_covariance(x, x);
}

}  // namespace lpp::stats
