#include "lpp/criterion.hpp"

#include <algorithm>
#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <numbers>

#include "lpp/errors.hpp"
#include "lpp/lattice.hpp"

namespace lpp {

namespace {

const double kLog4 = std::log(4.0);

double lhs(double s) { return kLog4 * s / (1 + s); }

double rhs(const WeightLaw& law, double s) {
  const ExpShapeParams params = exp_shape_params(law);
  return rate(law, g_exp(params, 1.0, s) / (1 + s)).value;
}

void check_p(double p) {
  if (!(p > 0 && p < 1)) throw ConfigError("p must lie in (0, 1)");
}

}  // namespace

double entropy(double p) {
  if (p < 0 || p > 1) throw DomainError("entropy: p outside [0, 1]");
  auto term = [](double x) { return x > 0 ? -x * std::log(x) : 0.0; };
  return term(p) + term(1 - p);
}

double phi_general(const WeightLaw& law, double s) {
  if (!(s >= 0)) throw ConfigError("phi: s must be >= 0");
  if (law.sampling_only())
    throw UnsupportedOperation("phi: " + law.spec() + " has no rate function");
  const double r = rhs(law, s);
  return std::isinf(r) ? -kInf : lhs(s) - r;
}

std::string CriterionReport::verdict() const {
  if (holds) return "holds (grid-certified)";
  std::string out = "fails at s =";
  const std::size_t shown = std::min<std::size_t>(failing_s.size(), 5);
  for (std::size_t i = 0; i < shown; ++i)
    out += (i ? ", " : " ") + std::to_string(failing_s[i]);
  if (failing_s.size() > shown) out += ", ...";
  return out;
}

CriterionReport check_criterion(const WeightLaw& law, int resolution) {
  if (resolution < 100)
    throw ConfigError("check_criterion: resolution must be >= 100");
  CriterionReport rep;
  rep.law = law.spec();
  const double h = 1.0 / (resolution + 1);
  for (int i = 1; i <= resolution; ++i) {
    const double s = i * h;
    rep.s_grid.push_back(s);
    rep.lhs.push_back(lhs(s));
    rep.phi.push_back(phi_general(law, s));
    rep.rhs.push_back(rep.lhs.back() - rep.phi.back());
  }
  rep.worst_phi = -kInf;
  auto record = [&](double s, double phi) {
    if (phi >= 0) rep.failing_s.push_back(s);
    if (phi > rep.worst_phi) {
      rep.worst_s = s;
      rep.worst_phi = phi;
    }
  };
  const int n = resolution;
  for (int i = 0; i < n; ++i) record(rep.s_grid[i], rep.phi[i]);
  for (int i = 0; i < n; ++i) {
    const double phi = rep.phi[i];
    if (!std::isfinite(phi)) continue;
    const int lo = std::max(i - 1, 0), hi = std::min(i + 1, n - 1);
    const double dphi = (rep.phi[hi] - rep.phi[lo]) / ((hi - lo) * h);
    if (std::isfinite(dphi) && std::abs(phi) >= 10 * h * std::abs(dphi))
      continue;
    // Resample the two cells adjacent to s_i, 20 points per cell.
    const double a = rep.s_grid[i] - h, b = rep.s_grid[i] + h;
    for (int j = 1; j < 40; ++j) {
      const double s = a + j * (b - a) / 40;
      if (s <= 0 || s >= 1 || j == 20) continue;
      record(s, phi_general(law, s));
      ++rep.refined_points;
    }
  }
  std::sort(rep.failing_s.begin(), rep.failing_s.end());
  rep.failing_s.erase(std::unique(rep.failing_s.begin(), rep.failing_s.end()),
                      rep.failing_s.end());
  rep.holds = rep.failing_s.empty();
  return rep;
}

bool k_bound_check(const WeightLaw& law, double s, double K) {
  if (!(s > 0)) throw ConfigError("k_bound_check: s must be > 0");
  if (!(K > moments(law).mean))
    throw ConfigError("k_bound_check: K must exceed the mean");
  return lhs(s) < rate(law, K / (1 + s)).value;
}

double bernoulli_u(double p, double s) {
  return 2 * std::sqrt(p * (1 - p)) * std::sqrt(s) / (1 + s);
}

double phi_bernoulli(double p, double s) {
  check_p(p);
  if (!(s >= 0)) throw ConfigError("phi_bernoulli: s must be >= 0");
  const double u = bernoulli_u(p, s);
  if (p + u >= 1) return -kInf;
  return lhs(s) + entropy(p + u) + u * std::log(p / (1 - p)) - entropy(p);
}

double s_star(double p) {
  if (!(p > 0.5 && p < 1)) throw DomainError("s_star: p must lie in (1/2, 1)");
  return (1 - 3 * p + 2 * std::sqrt(p * (2 * p - 1))) / (p - 1);
}

double s_star_bisect(double p) {
  if (!(p > 0.5 && p < 1)) throw DomainError("s_star: p must lie in (1/2, 1)");
  auto f = [p](double s) { return p + bernoulli_u(p, s) - 1; };
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15; };
  const auto [a, b] = boost::math::tools::bisect(f, 0.0, 1.0, tol);
  return 0.5 * (a + b);
}

BernoulliAnalysis bernoulli_analysis(double p, int points, double smax) {
  check_p(p);
  if (points < 1) throw ConfigError("bernoulli_analysis: points must be >= 1");
  BernoulliAnalysis out;
  out.p = p;
  out.s_star = p > 0.5 ? s_star(p) : kInf;
  if (smax <= 0) smax = p > 0.5 ? out.s_star : 1.0;
  for (int i = 1; i <= points; ++i) {
    const double s = smax * i / (points + 1);
    out.s_grid.push_back(s);
    out.phi.push_back(phi_bernoulli(p, s));
  }
  return out;
}

PStar p_star() {
  auto g = [](double p) { return (1 + p) / (1 + s_star(p)) - kLog4; };
  constexpr double lo = 0.5 + 1e-9, hi = 1 - 1e-9;
  PStar out;
  out.monotone = true;
  double prev = g(lo);
  for (int i = 1; i <= 1000; ++i) {
    const double v = g(lo + (hi - lo) * i / 1000);
    if (!(v > prev)) out.monotone = false;
    prev = v;
  }
  if (!out.monotone || !(g(lo) < 0 && g(hi) > 0))
    throw DomainError("p_star: bracket is not monotone");
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-14; };
  const auto [a, b] = boost::math::tools::bisect(g, lo, hi, tol);
  out.p = 0.5 * (a + b);
  out.residual = std::abs(g(out.p));
  return out;
}

}  // namespace lpp
