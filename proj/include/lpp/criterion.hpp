#pragma once

#include <string>
#include <vector>

#include "lpp/distributions.hpp"

namespace lpp {

/// H(p) = -p log p - (1 - p) log(1 - p), with 0 log 0 = 0.
double entropy(double p);

/// log(4) s / (1 + s) - I(g_Exp(1, s) / (1 + s)), using the law's own m and
/// sigma in g_Exp. -inf where the rate is +inf.
double phi_general(const WeightLaw& law, double s);

struct CriterionReport {
  std::string law;
  std::vector<double> s_grid;
  std::vector<double> lhs;  // log(4) s / (1 + s)
  std::vector<double> rhs;  // I(g_Exp(1, s) / (1 + s))
  std::vector<double> phi;
  bool holds = false;
  /// Grid points (including refinement points) where phi >= 0.
  std::vector<double> failing_s;
  double worst_s = 0.0;
  double worst_phi = 0.0;
  /// Number of extra points evaluated around near-zero grid values.
  int refined_points = 0;
  std::string verdict() const;
};

/// phi_general on the interior grid s_i = i / (resolution + 1). Wherever
/// |phi| < 10 h |phi'| the neighbouring cells are resampled 20 times finer
/// before the verdict is given.
CriterionReport check_criterion(const WeightLaw& law, int resolution = 1000);

/// log(4) s / (1 + s) < I(K / (1 + s)). Requires K > m and s > 0.
bool k_bound_check(const WeightLaw& law, double s, double K);

/// u_s = 2 sigma sqrt(s) / (1 + s) for Bernoulli(p).
double bernoulli_u(double p, double s);

/// Entropy form of phi for Bernoulli(p); -inf once p + u_s >= 1.
double phi_bernoulli(double p, double s);

/// Closed-form root of p + u_s = 1 on (0, 1]; p must lie in (1/2, 1).
double s_star(double p);

/// The same root by bisection on [0, 1].
double s_star_bisect(double p);

struct BernoulliAnalysis {
  double p = 0.0;
  double s_star = 0.0;
  std::vector<double> s_grid;  // interior grid of (0, smax)
  std::vector<double> phi;
};

/// phi_bernoulli on `points` interior points of (0, smax); smax defaults to
/// s*(p) when p > 1/2 and to 1 otherwise.
BernoulliAnalysis bernoulli_analysis(double p, int points = 1000,
                                     double smax = 0.0);

struct PStar {
  double p = 0.0;
  double residual = 0.0;  // |log 4 - (1 + p) / (1 + s*(p))|
  bool monotone = false;  // checked on 1000 grid points before solving
};

/// Root of log 4 = (1 + p) / (1 + s*(p)) on (1/2, 1).
PStar p_star();

}  // namespace lpp
