#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "lpp/format.hpp"
#include "lpp/rng.hpp"
#include "lpp/stats.hpp"
#include "lpp/errors.hpp"

using namespace lpp;

TEST_CASE("derived seeds are stable and separate labels and indices") {
  CHECK(derive_seed(1, "shape", 0) == derive_seed(1, "shape", 0));
  std::set<std::uint64_t> seen;
  for (const char* label : {"grid", "shape", "busemann", "good", "modify"})
    for (std::uint64_t i = 0; i < 50; ++i) seen.insert(derive_seed(1, label, i));
  CHECK(seen.size() == 250);
  CHECK(derive_seed(1, "shape", 3) != derive_seed(2, "shape", 3));
}

TEST_CASE("streams reproduce") {
  Engine a = make_stream(9, "x", 4), b = make_stream(9, "x", 4);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}

TEST_CASE("sample moments") {
  const std::vector<double> x{1, 2, 3, 4};
  const std::vector<double> y{2, 4, 6, 9};
  CHECK(stats::mean(x) == doctest::Approx(2.5));
  CHECK(stats::variance(x) == doctest::Approx(5.0 / 3));
  // sum (x - 2.5)(y - 5.25) / 3
  CHECK(stats::covariance(x, y) == doctest::Approx((4.875 + 0.625 + 0.375 + 5.625) / 3));
  const auto m = stats::mean_estimate(x);
  CHECK(m.std_error == doctest::Approx(std::sqrt(5.0 / 3 / 4)));
}

TEST_CASE("jackknife covariance matches a direct leave-one-out computation") {
  Engine e = make_stream(3, "test", 0);
  std::normal_distribution<double> nd;
  std::vector<double> x(40), y(40);
  for (int i = 0; i < 40; ++i) {
    x[i] = nd(e);
    y[i] = 0.5 * x[i] + nd(e);
  }
  std::vector<double> loo;
  for (int i = 0; i < 40; ++i) {
    std::vector<double> xs, ys;
    for (int j = 0; j < 40; ++j)
      if (j != i) {
        xs.push_back(x[j]);
        ys.push_back(y[j]);
      }
    loo.push_back(stats::covariance(xs, ys));
  }
  const double lm = stats::mean(loo);
  double ss = 0;
  for (double v : loo) ss += (v - lm) * (v - lm);
  const auto est = stats::jackknife_covariance(x, y);
  CHECK(est.value == doctest::Approx(stats::covariance(x, y)));
  CHECK(est.std_error == doctest::Approx(std::sqrt(39.0 / 40 * ss)));
  CHECK(est.std_error > 0);

  const auto var = stats::jackknife_variance(x);
  CHECK(var.value == doctest::Approx(stats::variance(x)));
  const auto ratio = stats::jackknife_variance_ratio(x, x);
  CHECK(ratio.value == doctest::Approx(1.0));
  CHECK(ratio.std_error == doctest::Approx(0.0).epsilon(1e-9));
}

TEST_CASE("two samples give an infinite jackknife error") {
  const std::vector<double> x{1, 2}, y{3, 1};
  CHECK(std::isinf(stats::jackknife_covariance(x, y).std_error));
}

TEST_CASE("ks statistic of a perfect grid") {
  std::vector<double> u;
  for (int i = 0; i < 100; ++i) u.push_back((i + 0.5) / 100);
  CHECK(stats::ks_statistic(u, [](double t) { return t; }) ==
        doctest::Approx(0.005));
}

TEST_CASE("double formatting round-trips") {
  for (double v : {0.1, 1.0 / 3, 2.0, 1e-300, -7.25e12}) {
    CHECK(parse_double(format_double(v)) == v);
  }
  CHECK(format_double(INFINITY) == "inf");
  CHECK(format_double(-INFINITY) == "-inf");
  CHECK(std::isinf(parse_double("inf")));
  CHECK_THROWS_AS(parse_double("1.5x"), ConfigError);
  CHECK_THROWS_AS(parse_double(""), ConfigError);
}
