#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "lpp/distributions.hpp"
#include "lpp/errors.hpp"
#include "lpp/stats.hpp"

using namespace lpp;
using doctest::Approx;

namespace {

WeightLaw bern(double p) { return WeightLaw(Bernoulli{p}); }
WeightLaw expo(double rate) { return WeightLaw(Exponential{rate}); }

}  // namespace

TEST_CASE("law grammar round-trips") {
  for (const char* s : {"bernoulli:p=0.7", "exp:rate=1", "uniform:lo=0,hi=1",
                        "twopoint:a=2,b=5,p=0.7", "geometric:p=0.5",
                        "lognormal:mu=0,sigma=1", "chisq:k=0.5"}) {
    const WeightLaw law = parse_law(s);
    CHECK(parse_law(law.spec()).spec() == law.spec());
  }
  CHECK_THROWS_AS(parse_law("bernoulli:p=1.5"), ConfigError);
  CHECK_THROWS_AS(parse_law("exp:rate=0"), ConfigError);
  CHECK_THROWS_AS(parse_law("uniform:lo=1,hi=1"), ConfigError);
  CHECK_THROWS_AS(parse_law("cauchy:x=1"), ConfigError);
  CHECK_THROWS_AS(parse_law("bernoulli:q=0.5"), ConfigError);
}

TEST_CASE("sampling") {
  SUBCASE("Bernoulli mean") {
    Engine e = make_stream(1, "t", 0);
    const auto x = sample(bern(0.7), e, 1'000'000);
    CHECK(std::abs(stats::mean(x) - 0.7) < 0.002);
  }
  SUBCASE("two-point support") {
    Engine e = make_stream(5, "t", 0);
    for (double v : sample(WeightLaw(TwoPoint{2, 5, 0.5}), e, 4))
      CHECK((v == 2.0 || v == 5.0));
  }
  SUBCASE("Exponential variance") {
    Engine e = make_stream(2, "t", 0);
    const auto x = sample(expo(1), e, 1'000'000);
    CHECK(std::abs(stats::variance(x) - 1.0) < 0.01);
  }
  SUBCASE("geometric counts failures") {
    Engine e = make_stream(4, "t", 0);
    const auto x = sample(WeightLaw(Geometric{0.5}), e, 200'000);
    CHECK(std::abs(stats::mean(x) - 1.0) < 0.02);
    for (int i = 0; i < 100; ++i) CHECK(x[i] == std::floor(x[i]));
  }
  SUBCASE("same seed, same draws") {
    Engine a = make_stream(8, "t", 1), b = make_stream(8, "t", 1);
    CHECK(sample(parse_law("chisq:k=0.5"), a, 100) ==
          sample(parse_law("chisq:k=0.5"), b, 100));
  }
}

TEST_CASE("moments") {
  auto m = moments(bern(0.75));
  CHECK(m.mean == Approx(0.75));
  CHECK(m.variance == Approx(0.1875));
  m = moments(expo(1));
  CHECK(m.mean == Approx(1));
  CHECK(m.variance == Approx(1));
  m = moments(WeightLaw(Uniform{0, 1}));
  CHECK(m.mean == Approx(0.5));
  CHECK(m.variance == Approx(1.0 / 12));
  m = moments(WeightLaw(Geometric{0.25}));
  CHECK(m.mean == Approx(3));
  CHECK(m.variance == Approx(0.75 / 0.0625));
  m = moments(WeightLaw(TwoPoint{2, 5, 0.7}));
  CHECK(m.mean == Approx(4.1));
  CHECK(m.variance == Approx(9 * 0.21));
  CHECK(m.sd == Approx(std::sqrt(m.variance)));
}

TEST_CASE("log-MGF") {
  CHECK(log_mgf(bern(0.5), 0) == 0.0);
  CHECK(log_mgf(expo(1), 0.5) == Approx(std::log(2.0)));
  CHECK(std::isinf(log_mgf(expo(1), 1.0)));
  CHECK(log_mgf(bern(0.3), 2.0) == Approx(std::log(0.7 + 0.3 * std::exp(2.0))));
}

TEST_CASE("log-MGF derivatives at zero give the moments") {
  for (const char* s : {"bernoulli:p=0.3", "exp:rate=2", "uniform:lo=-1,hi=3",
                        "twopoint:a=2,b=5,p=0.7", "geometric:p=0.6"}) {
    const WeightLaw law = parse_law(s);
    const auto m = moments(law);
    const double h = 1e-5;
    const double d1 = (log_mgf(law, h) - log_mgf(law, -h)) / (2 * h);
    CHECK(d1 == Approx(m.mean).epsilon(1e-6));
    const double k = 1e-3;
    const double d2 = (log_mgf(law, k) - 2 * log_mgf(law, 0) + log_mgf(law, -k)) / (k * k);
    CHECK(std::abs(d2 - m.variance) < 1e-4 * std::max(1.0, m.variance));
  }
}

TEST_CASE("rate function values") {
  CHECK(rate(bern(0.5), 0.75).value ==
        Approx(0.75 * std::log(1.5) + 0.25 * std::log(0.5)));
  CHECK(rate(bern(0.5), 0.75).value == Approx(0.130812).epsilon(1e-6));
  CHECK(rate(bern(0.3), 0.3).value == Approx(0.0).epsilon(1e-14));
  CHECK(rate(expo(1), 2).value == Approx(2 - 1 - std::log(2.0)));
  CHECK(rate_numeric(expo(1), 2) == Approx(2 - 1 - std::log(2.0)).epsilon(1e-9));
  CHECK(std::isinf(rate(bern(0.5), 1.2).value));
  CHECK(std::isinf(rate(expo(1), -0.1).value));
  CHECK_THROWS_AS(rate(parse_law("lognormal:mu=0,sigma=1"), 1.0), UnsupportedOperation);
  CHECK(parse_law("chisq:k=0.5").sampling_only());
}

TEST_CASE("numeric rate agrees with the Bernoulli closed form") {
  const double p = 0.35;
  for (int i = 1; i <= 200; ++i) {
    const double x = i / 201.0;
    const double closed = x * std::log(x / p) + (1 - x) * std::log((1 - x) / (1 - p));
    CHECK(rate_numeric(bern(p), x) == Approx(closed).epsilon(1e-8));
    CHECK(bernoulli_rate(p, x) == Approx(closed).epsilon(1e-12));
  }
}

TEST_CASE("numeric rate for laws without a closed form") {
  // Uniform(0, 1): the sup is attained where coth-type equation holds; cross
  // check against a brute-force scan of a t - log M(t).
  const WeightLaw u(Uniform{0, 1});
  for (double a : {0.2, 0.5, 0.8}) {
    double best = 0;
    for (int i = -40000; i <= 40000; ++i) {
      const double t = i * 1e-3;
      best = std::max(best, a * t - log_mgf(u, t));
    }
    CHECK(rate(u, a).value == Approx(best).epsilon(1e-5));
  }
}

TEST_CASE("rate is nonnegative, zero at the mean and convex") {
  Engine e = make_stream(11, "t", 0);
  for (const char* s : {"bernoulli:p=0.7", "exp:rate=1", "uniform:lo=0,hi=2",
                        "twopoint:a=2,b=5,p=0.3", "geometric:p=0.4"}) {
    const WeightLaw law = parse_law(s);
    const auto m = moments(law);
    CHECK(rate(law, m.mean).value == Approx(0.0).epsilon(1e-9));
    const Interval d = rate(law, m.mean).finite_domain;
    const double lo = std::max(d.lo, m.mean - 3 * m.sd);
    const double hi = std::min(d.hi, m.mean + 3 * m.sd);
    std::uniform_real_distribution<double> ud(lo, hi), lam(0, 1);
    for (int i = 0; i < 50; ++i) {
      const double a1 = ud(e), a2 = ud(e), l = lam(e);
      const double i1 = rate(law, a1).value, i2 = rate(law, a2).value;
      CHECK(i1 >= 0);
      CHECK(rate(law, l * a1 + (1 - l) * a2).value <= l * i1 + (1 - l) * i2 + 1e-9);
    }
  }
}

TEST_CASE("affine rate") {
  for (double s : {0.1, 0.5, 0.9})
    CHECK(affine_rate(WeightLaw(TwoPoint{0, 1, 0.4}), s) ==
          Approx(rate(bern(0.4), s).value));
  CHECK(affine_rate(WeightLaw(TwoPoint{2, 5, 0.7}), 4.1) == Approx(0.0).epsilon(1e-12));
  CHECK(affine_rate(WeightLaw(TwoPoint{0, 2, 0.5}), 1.5) ==
        Approx(0.75 * std::log(1.5) + 0.25 * std::log(0.5)));
  CHECK_THROWS_AS(affine_rate(expo(1), 1.0), ConfigError);
}

TEST_CASE("increasing convex order gap") {
  const double r3 = std::sqrt(3.0);
  const WeightLaw f = bern(0.5);
  const WeightLaw g(Uniform{0.5 - r3 / 2, 0.5 + r3 / 2});
  CHECK(moments(g).variance == Approx(0.25));
  // E(X - 1/2)^+ = 1/4 for F; for G the positive part integrates to
  // (r3/2)^2 / (2 r3) = 3/8 / r3.
  CHECK(icx_gap(f, g, 0.5) == Approx(0.25 - 0.375 / r3).epsilon(1e-8));
  CHECK(icx_gap(f, g, 1.2) < 0);
  for (double t : {-1.0, 0.3, 2.0}) CHECK(icx_gap(g, g, t) == 0.0);
  const IcxProbe probe = icx_probe(f, g);
  CHECK(probe.sign_change);
  CHECK(probe.max_gap > 0);
  CHECK(probe.min_gap < 0);
}

TEST_CASE("equal mean and variance forces an icx sign change") {
  // Exp(1) against Uniform(1 - sqrt3, 1 + sqrt3) and TwoPoint(0, 2, 1/2).
  const WeightLaw e = expo(1);
  const double r3 = std::sqrt(3.0);
  for (const WeightLaw& other :
       {WeightLaw(Uniform{1 - r3, 1 + r3}), WeightLaw(TwoPoint{0, 2, 0.5})}) {
    CHECK(moments(other).variance == Approx(1.0));
    CHECK(icx_probe(e, other).sign_change);
  }
}

TEST_CASE("expected excess closed forms") {
  CHECK(expected_excess(expo(1), 1.0) == Approx(std::exp(-1.0)));
  CHECK(expected_excess(expo(1), -2.0) == Approx(3.0));
  CHECK(expected_excess(bern(0.3), 0.5) == Approx(0.15));
  CHECK(expected_excess(WeightLaw(Uniform{0, 1}), 0.5) == Approx(0.125));
}
