#pragma once

#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "lpp/rng.hpp"

namespace lpp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bernoulli {
  double p;
};
/// Takes value b with probability p and a with probability 1 - p.
struct TwoPoint {
  double a, b, p;
};
struct Exponential {
  double rate;
};
/// Number of failures before the first success: support {0, 1, 2, ...},
/// mean (1 - p) / p.
struct Geometric {
  double p;
};
struct Uniform {
  double lo, hi;
};
struct LogNormal {
  double mu, sigma;
};
struct ChiSquared {
  double k;
};

struct MomentSummary {
  double mean;
  double variance;
  double sd;
};

struct Interval {
  double lo;
  double hi;
  bool contains(double x) const { return lo <= x && x <= hi; }
};

/// An i.i.d. vertex-weight distribution. Parameters are validated on
/// construction; invalid combinations throw ConfigError.
class WeightLaw {
 public:
  using Params = std::variant<Bernoulli, TwoPoint, Exponential, Geometric,
                              Uniform, LogNormal, ChiSquared>;

  explicit WeightLaw(Params params);

  const Params& params() const { return params_; }

  /// Canonical `kind:key=value,...` form, accepted by parse_law.
  std::string spec() const;

  /// LogNormal and ChiSquared are only used for sampling; the rate-function
  /// machinery refuses them.
  bool sampling_only() const;

  /// Closed hull of the support (may be unbounded above).
  Interval support_hull() const;

  /// Open interval of t on which log M(t) is finite.
  Interval mgf_domain() const;

  /// Writes i.i.d. draws into `out`. The engine is advanced identically for a
  /// given law and output length.
  void fill(Engine& engine, std::span<double> out) const;

 private:
  Params params_;
};

/// Parses `bernoulli:p=0.7`, `exp:rate=1`, `uniform:lo=0,hi=1`,
/// `twopoint:a=2,b=5,p=0.7`, `geometric:p=0.5`, `lognormal:mu=0,sigma=1`,
/// `chisq:k=0.5`.
WeightLaw parse_law(std::string_view text);

std::vector<double> sample(const WeightLaw& law, Engine& engine,
                           std::size_t count);

MomentSummary moments(const WeightLaw& law);

/// log E[exp(t X)]; +inf outside the convergence region.
double log_mgf(const WeightLaw& law, double t);

struct RateEvaluation {
  double point;
  double value;  // in [0, +inf]
  Interval finite_domain;
};

/// Cramer rate function I(a) = sup_t { a t - log M(t) }. Closed form for
/// Bernoulli, TwoPoint, Exponential and Geometric; numeric otherwise.
/// Throws UnsupportedOperation for sampling-only laws.
RateEvaluation rate(const WeightLaw& law, double a);

/// The numeric Legendre route: bracket expansion from t = 0 followed by
/// golden-section ascent on the concave map t -> a t - log M(t).
double rate_numeric(const WeightLaw& law, double a);

/// Rate function of a TwoPoint law via the Bernoulli rate at (s-a)/(b-a).
double affine_rate(const WeightLaw& two_point, double s);

/// Bernoulli(p) rate in closed form, 0 log 0 = 0, +inf outside [0, 1].
double bernoulli_rate(double p, double x);

/// E[(X - t)^+].
double expected_excess(const WeightLaw& law, double t);

/// h(t) = E_F (X - t)^+ - E_G (X - t)^+.
double icx_gap(const WeightLaw& f, const WeightLaw& g, double t);

struct IcxProbe {
  bool sign_change = false;
  double t_positive = 0.0;  // argmax of h
  double max_gap = 0.0;
  double t_negative = 0.0;  // argmin of h
  double min_gap = 0.0;
};

/// Scans h over the joint support hull (upper tails truncated at mean + 12 sd)
/// and reports where it is most positive and most negative. A sign change
/// witnesses that neither law dominates the other in the increasing convex
/// order.
IcxProbe icx_probe(const WeightLaw& f, const WeightLaw& g, int points = 4001);

}  // namespace lpp
