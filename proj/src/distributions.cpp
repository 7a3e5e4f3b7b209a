#include "lpp/distributions.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <map>
#include <numbers>

#include "lpp/errors.hpp"
#include "lpp/format.hpp"

namespace lpp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* what) {
  if (!ok) throw ConfigError(what);
}

bool finite_all(std::initializer_list<double> xs) {
  return std::all_of(xs.begin(), xs.end(),
                     [](double v) { return std::isfinite(v); });
}

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

double log_add_exp(double a, double b) {
  const double hi = std::max(a, b), lo = std::min(a, b);
  if (hi == -kInf) return -kInf;
  return hi + std::log1p(std::exp(lo - hi));
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

}  // namespace

WeightLaw::WeightLaw(Params params) : params_(params) {
  std::visit(
      overloaded{
          [](const Bernoulli& b) {
            require(finite_all({b.p}) && b.p > 0 && b.p < 1,
                    "bernoulli: p must lie in (0,1)");
          },
          [](const TwoPoint& t) {
            require(finite_all({t.a, t.b, t.p}) && t.p > 0 && t.p < 1,
                    "twopoint: p must lie in (0,1)");
            require(t.a < t.b, "twopoint: requires a < b");
          },
          [](const Exponential& e) {
            require(finite_all({e.rate}) && e.rate > 0, "exp: rate must be > 0");
          },
          [](const Geometric& g) {
            require(finite_all({g.p}) && g.p > 0 && g.p < 1,
                    "geometric: p must lie in (0,1)");
          },
          [](const Uniform& u) {
            require(finite_all({u.lo, u.hi}) && u.lo < u.hi,
                    "uniform: requires lo < hi");
          },
          [](const LogNormal& l) {
            require(finite_all({l.mu, l.sigma}) && l.sigma > 0,
                    "lognormal: sigma must be > 0");
          },
          [](const ChiSquared& c) {
            require(finite_all({c.k}) && c.k > 0, "chisq: k must be > 0");
          },
      },
      params_);
}

std::string WeightLaw::spec() const {
  auto f = format_double;
  return std::visit(
      overloaded{
          [&](const Bernoulli& b) { return "bernoulli:p=" + f(b.p); },
          [&](const TwoPoint& t) {
            return "twopoint:a=" + f(t.a) + ",b=" + f(t.b) + ",p=" + f(t.p);
          },
          [&](const Exponential& e) { return "exp:rate=" + f(e.rate); },
          [&](const Geometric& g) { return "geometric:p=" + f(g.p); },
          [&](const Uniform& u) {
            return "uniform:lo=" + f(u.lo) + ",hi=" + f(u.hi);
          },
          [&](const LogNormal& l) {
            return "lognormal:mu=" + f(l.mu) + ",sigma=" + f(l.sigma);
          },
          [&](const ChiSquared& c) { return "chisq:k=" + f(c.k); },
      },
      params_);
}

bool WeightLaw::sampling_only() const {
  return std::holds_alternative<LogNormal>(params_) ||
         std::holds_alternative<ChiSquared>(params_);
}

Interval WeightLaw::support_hull() const {
  return std::visit(
      overloaded{
          [](const Bernoulli&) { return Interval{0.0, 1.0}; },
          [](const TwoPoint& t) { return Interval{t.a, t.b}; },
          [](const Uniform& u) { return Interval{u.lo, u.hi}; },
          [](const auto&) { return Interval{0.0, kInf}; },
      },
      params_);
}

Interval WeightLaw::mgf_domain() const {
  return std::visit(
      overloaded{
          [](const Exponential& e) { return Interval{-kInf, e.rate}; },
          [](const Geometric& g) { return Interval{-kInf, -std::log1p(-g.p)}; },
          [](const LogNormal&) { return Interval{-kInf, 0.0}; },
          [](const ChiSquared&) { return Interval{-kInf, 0.5}; },
          [](const auto&) { return Interval{-kInf, kInf}; },
      },
      params_);
}

void WeightLaw::fill(Engine& engine, std::span<double> out) const {
  auto run = [&](auto&& dist, auto&& map) {
    for (double& v : out) v = map(dist(engine));
  };
  auto id = [](auto v) { return static_cast<double>(v); };
  std::visit(
      overloaded{
          [&](const Bernoulli& b) {
            run(std::bernoulli_distribution(b.p), id);
          },
          [&](const TwoPoint& t) {
            run(std::bernoulli_distribution(t.p),
                [&](bool hit) { return hit ? t.b : t.a; });
          },
          [&](const Exponential& e) {
            run(std::exponential_distribution<double>(e.rate), id);
          },
          [&](const Geometric& g) {
            run(std::geometric_distribution<long long>(g.p), id);
          },
          [&](const Uniform& u) {
            run(std::uniform_real_distribution<double>(u.lo, u.hi), id);
          },
          [&](const LogNormal& l) {
            run(std::lognormal_distribution<double>(l.mu, l.sigma), id);
          },
          [&](const ChiSquared& c) {
            run(std::chi_squared_distribution<double>(c.k), id);
          },
      },
      params_);
}

WeightLaw parse_law(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ConfigError("law spec needs 'kind:key=value': '" + std::string(text) +
                      "'");
  const std::string kind(text.substr(0, colon));
  std::map<std::string, double, std::less<>> kv;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto item = rest.substr(0, comma);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError("law parameter needs key=value: '" + std::string(item) +
                        "'");
    kv[std::string(item.substr(0, eq))] = parse_double(item.substr(eq + 1));
    rest = comma == std::string_view::npos ? std::string_view{}
                                           : rest.substr(comma + 1);
  }
  auto take = [&](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end())
      throw ConfigError(kind + ": missing parameter '" + key + "'");
    const double v = it->second;
    kv.erase(it);
    return v;
  };
  auto finish = [&](WeightLaw::Params p) {
    if (!kv.empty())
      throw ConfigError(kind + ": unknown parameter '" + kv.begin()->first +
                        "'");
    return WeightLaw(p);
  };
  if (kind == "bernoulli") return finish(Bernoulli{take("p")});
  if (kind == "twopoint") {
    const double a = take("a"), b = take("b"), p = take("p");
    return finish(TwoPoint{a, b, p});
  }
  if (kind == "exp" || kind == "exponential")
    return finish(Exponential{take("rate")});
  if (kind == "geometric") return finish(Geometric{take("p")});
  if (kind == "uniform") {
    const double lo = take("lo"), hi = take("hi");
    return finish(Uniform{lo, hi});
  }
  if (kind == "lognormal") {
    const double mu = take("mu"), sigma = take("sigma");
    return finish(LogNormal{mu, sigma});
  }
  if (kind == "chisq") return finish(ChiSquared{take("k")});
  throw ConfigError("unknown law kind '" + kind + "'");
}

std::vector<double> sample(const WeightLaw& law, Engine& engine,
                           std::size_t count) {
  std::vector<double> out(count);
  law.fill(engine, out);
  return out;
}

MomentSummary moments(const WeightLaw& law) {
  auto [m, v] = std::visit(
      overloaded{
          [](const Bernoulli& b) {
            return std::pair{b.p, b.p * (1 - b.p)};
          },
          [](const TwoPoint& t) {
            const double w = t.b - t.a;
            return std::pair{t.a + t.p * w, t.p * (1 - t.p) * w * w};
          },
          [](const Exponential& e) {
            return std::pair{1 / e.rate, 1 / (e.rate * e.rate)};
          },
          [](const Geometric& g) {
            return std::pair{(1 - g.p) / g.p, (1 - g.p) / (g.p * g.p)};
          },
          [](const Uniform& u) {
            const double w = u.hi - u.lo;
            return std::pair{0.5 * (u.lo + u.hi), w * w / 12};
          },
          [](const LogNormal& l) {
            const double s2 = l.sigma * l.sigma;
            return std::pair{std::exp(l.mu + s2 / 2),
                             std::expm1(s2) * std::exp(2 * l.mu + s2)};
          },
          [](const ChiSquared& c) { return std::pair{c.k, 2 * c.k}; },
      },
      law.params());
  return {m, v, std::sqrt(v)};
}

double log_mgf(const WeightLaw& law, double t) {
  if (t == 0.0) return 0.0;
  return std::visit(
      overloaded{
          [&](const Bernoulli& b) {
            return log_add_exp(std::log1p(-b.p), std::log(b.p) + t);
          },
          [&](const TwoPoint& w) {
            return log_add_exp(std::log1p(-w.p) + w.a * t,
                               std::log(w.p) + w.b * t);
          },
          [&](const Exponential& e) {
            return t < e.rate ? -std::log1p(-t / e.rate) : kInf;
          },
          [&](const Geometric& g) {
            const double q = 1 - g.p;
            if (t >= -std::log(q)) return kInf;
            return std::log(g.p) - std::log1p(-q * std::exp(t));
          },
          [&](const Uniform& u) {
            const double w = u.hi - u.lo, x = t * w;
            double tail;
            if (std::abs(x) < 1e-5)
              tail = x / 2 + x * x / 24;
            else if (x > 0)
              tail = (x > 30 ? x + std::log1p(-std::exp(-x))
                             : std::log(std::expm1(x))) -
                     std::log(x);
            else
              tail = std::log(-std::expm1(x)) - std::log(-x);
            return t * u.lo + tail;
          },
          [&](const LogNormal& l) {
            if (t > 0) return kInf;
            auto integrand = [&](double z) {
              return std::exp(-0.5 * z * z + t * std::exp(l.mu + l.sigma * z)) /
                     std::sqrt(2 * std::numbers::pi);
            };
            using boost::math::quadrature::gauss_kronrod;
            return std::log(
                gauss_kronrod<double, 61>::integrate(integrand, -kInf, kInf, 15,
                                                     1e-13));
          },
          [&](const ChiSquared& c) {
            return t < 0.5 ? -0.5 * c.k * std::log1p(-2 * t) : kInf;
          },
      },
      law.params());
}

double bernoulli_rate(double p, double x) {
  if (!(x >= 0.0 && x <= 1.0)) return kInf;
  return xlogy(x, x / p) + xlogy(1 - x, (1 - x) / (1 - p));
}

namespace {

Interval rate_domain(const WeightLaw& law) {
  return std::visit(
      overloaded{
          [](const Bernoulli&) { return Interval{0.0, 1.0}; },
          [](const TwoPoint& t) { return Interval{t.a, t.b}; },
          [](const Uniform& u) {
            // Open at both ends; the endpoints themselves have infinite rate.
            return Interval{std::nextafter(u.lo, kInf),
                            std::nextafter(u.hi, -kInf)};
          },
          [](const Exponential&) {
            return Interval{std::numeric_limits<double>::min(), kInf};
          },
          [](const auto&) { return Interval{0.0, kInf}; },
      },
      law.params());
}

void require_rate_law(const WeightLaw& law) {
  if (law.sampling_only())
    throw UnsupportedOperation("rate function unavailable for sampling-only law " +
                               law.spec());
}

}  // namespace

double rate_numeric(const WeightLaw& law, double a) {
  require_rate_law(law);
  const Interval dom = rate_domain(law);
  if (!(a >= dom.lo && a <= dom.hi)) return kInf;
  const MomentSummary mom = moments(law);
  if (a == mom.mean) return 0.0;

  auto objective = [&](double t) { return a * t - log_mgf(law, t); };
  const Interval tdom = law.mgf_domain();
  const double dir = a > mom.mean ? 1.0 : -1.0;
  const double bound = dir > 0 ? tdom.hi : tdom.lo;
  constexpr double kTMax = 1e4;

  // Expand geometrically until the objective turns down. Steps that would
  // leave the mgf domain are replaced by halving the distance to its edge.
  double lo = 0.0, mid = 0.0, f_mid = 0.0;
  double step = 0.5 / mom.sd;
  double hi = dir * step;
  auto clamp_to_domain = [&](double from, double to) {
    if (std::isfinite(bound) && dir * (to - bound) >= 0) return 0.5 * (from + bound);
    return to;
  };
  hi = clamp_to_domain(mid, hi);
  double f_hi = objective(hi);
  int guard = 0;
  while (f_hi > f_mid) {
    if (std::abs(hi) > kTMax || ++guard > 400) return std::max(0.0, f_hi);
    lo = mid;
    mid = hi;
    f_mid = f_hi;
    step *= 2;
    hi = clamp_to_domain(mid, mid + dir * step);
    f_hi = objective(hi);
  }

  // Golden-section ascent on [lo, hi] (unordered when dir < 0).
  double x0 = std::min(lo, hi), x3 = std::max(lo, hi);
  const double g = (std::sqrt(5.0) - 1) / 2;
  double x1 = x3 - g * (x3 - x0), x2 = x0 + g * (x3 - x0);
  double f1 = objective(x1), f2 = objective(x2);
  while (x3 - x0 > 1e-10 * std::max(1.0, std::abs(x1))) {
    if (f1 < f2) {
      x0 = x1;
      x1 = x2;
      f1 = f2;
      x2 = x0 + g * (x3 - x0);
      f2 = objective(x2);
    } else {
      x3 = x2;
      x2 = x1;
      f2 = f1;
      x1 = x3 - g * (x3 - x0);
      f1 = objective(x1);
    }
  }
  return std::max({0.0, f1, f2, f_mid});
}

RateEvaluation rate(const WeightLaw& law, double a) {
  require_rate_law(law);
  const Interval dom = rate_domain(law);
  const double value = std::visit(
      overloaded{
          [&](const Bernoulli& b) { return bernoulli_rate(b.p, a); },
          [&](const TwoPoint& t) {
            return bernoulli_rate(t.p, (a - t.a) / (t.b - t.a));
          },
          [&](const Exponential& e) {
            if (!(a > 0)) return kInf;
            const double x = e.rate * a;
            return x - 1 - std::log(x);
          },
          [&](const Geometric& g) {
            if (!(a >= 0)) return kInf;
            const double q = 1 - g.p;
            return xlogy(a, a / ((1 + a) * q)) - std::log(g.p) - std::log1p(a);
          },
          [&](const auto&) { return rate_numeric(law, a); },
      },
      law.params());
  return {a, std::max(0.0, value), dom};
}

double affine_rate(const WeightLaw& two_point, double s) {
  const auto* t = std::get_if<TwoPoint>(&two_point.params());
  if (t == nullptr) throw ConfigError("affine_rate expects a twopoint law");
  if (!(t->b > t->a)) throw ConfigError("affine_rate: degenerate b <= a");
  return bernoulli_rate(t->p, (s - t->a) / (t->b - t->a));
}

double expected_excess(const WeightLaw& law, double t) {
  const double m = moments(law).mean;
  auto pos = [](double v) { return v > 0 ? v : 0.0; };
  return std::visit(
      overloaded{
          [&](const Bernoulli& b) { return b.p * pos(1 - t) + (1 - b.p) * pos(-t); },
          [&](const TwoPoint& w) {
            return w.p * pos(w.b - t) + (1 - w.p) * pos(w.a - t);
          },
          [&](const Exponential& e) {
            return t <= 0 ? m - t : std::exp(-e.rate * t) / e.rate;
          },
          [&](const Geometric& g) {
            if (t < 0) return m - t;
            const double j = std::floor(t) + 1;
            return std::pow(1 - g.p, j) * (m + j - t);
          },
          [&](const Uniform& u) {
            if (t <= u.lo) return m - t;
            if (t >= u.hi) return 0.0;
            return (u.hi - t) * (u.hi - t) / (2 * (u.hi - u.lo));
          },
          [&](const LogNormal& l) {
            if (t <= 0) return m - t;
            const double d1 = (l.mu + l.sigma * l.sigma - std::log(t)) / l.sigma;
            return m * normal_cdf(d1) - t * normal_cdf(d1 - l.sigma);
          },
          [&](const ChiSquared& c) {
            if (t <= 0) return m - t;
            using boost::math::gamma_q;
            return c.k * gamma_q(c.k / 2 + 1, t / 2) - t * gamma_q(c.k / 2, t / 2);
          },
      },
      law.params());
}

double icx_gap(const WeightLaw& f, const WeightLaw& g, double t) {
  return expected_excess(f, t) - expected_excess(g, t);
}

IcxProbe icx_probe(const WeightLaw& f, const WeightLaw& g, int points) {
  auto upper = [](const WeightLaw& law) {
    const Interval h = law.support_hull();
    if (std::isfinite(h.hi)) return h.hi;
    const MomentSummary mom = moments(law);
    return mom.mean + 12 * mom.sd;
  };
  const double lo = std::min(f.support_hull().lo, g.support_hull().lo);
  const double hi = std::max(upper(f), upper(g));
  IcxProbe probe;
  probe.max_gap = -kInf;
  probe.min_gap = kInf;
  for (int i = 0; i < points; ++i) {
    const double t = lo + (hi - lo) * i / (points - 1);
    const double h = icx_gap(f, g, t);
    if (h > probe.max_gap) {
      probe.max_gap = h;
      probe.t_positive = t;
    }
    if (h < probe.min_gap) {
      probe.min_gap = h;
      probe.t_negative = t;
    }
  }
  probe.sign_change = probe.max_gap > 1e-12 && probe.min_gap < -1e-12;
  return probe;
}

}  // namespace lpp
