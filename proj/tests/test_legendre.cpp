#include <doctest.h>

#include <cmath>
#include <vector>

#include "lpp/errors.hpp"
#include "lpp/legendre.hpp"

using namespace lpp;
using doctest::Approx;

namespace {

std::vector<double> shifted(std::vector<double> v, double by) {
  for (double& x : v) x += by;
  return v;
}

double exp_dual(double m, double sigma, double a) { return m + sigma * sigma / (a - m); }

}  // namespace

TEST_CASE("log grid endpoints and ratio") {
  const auto g = log_grid(0.01, 100, 5);
  REQUIRE(g.size() == 5);
  CHECK(g.front() == Approx(0.01));
  CHECK(g[2] == Approx(1.0));
  CHECK(g.back() == Approx(100));
}

TEST_CASE("analytic exponential slice is concave") {
  const auto sl = exp_slice({1, 1}, log_grid(1e-3, 1e3, 500));
  for (std::size_t i = 1; i + 1 < sl.s_grid.size(); ++i) {
    const double s0 = sl.s_grid[i - 1], s1 = sl.s_grid[i], s2 = sl.s_grid[i + 1];
    const double chord = sl.gamma[i - 1] + (sl.gamma[i + 1] - sl.gamma[i - 1]) * (s1 - s0) / (s2 - s0);
    CHECK(sl.gamma[i] >= chord - 1e-9);
  }
}

TEST_CASE("dual of the exponential slice") {
  for (auto [m, sigma] : {std::pair{1.0, 1.0}, std::pair{0.7, std::sqrt(0.21)}, std::pair{2.0, 0.5}}) {
    const auto sl = exp_slice({m, sigma}, log_grid(1e-4, 1e4, 2000));
    const auto a = shifted(log_grid(0.05, 5, 300), m);
    const auto f = dual_from_slice(sl, a);
    double err = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
      err = std::max(err, std::abs(f.f_values[i] - exp_dual(m, sigma, a[i])));
    CHECK(err <= 1e-4);
  }
  const auto sl = exp_slice({1, 1}, log_grid(1e-4, 1e4, 2000));
  const std::vector<double> two{2.0};
  CHECK(dual_from_slice(sl, two).f_values[0] == Approx(2.0).epsilon(1e-6));
  const std::vector<double> far{11.0, 51.0};
  const auto tail = dual_from_slice(sl, far).f_values;
  CHECK(tail[0] == Approx(1.1).epsilon(1e-6));
  CHECK(tail[1] == Approx(1.02).epsilon(1e-6));
  const std::vector<double> low{1.0, 0.5};
  for (double v : dual_from_slice(sl, low).f_values) CHECK(std::isinf(v));
}

TEST_CASE("linear slice has a flat dual") {
  ShapeSlice sl;
  sl.m = 1.5;
  sl.s_grid = log_grid(1e-4, 1e2, 400);
  for (double s : sl.s_grid) sl.gamma.push_back(1.5 * (1 + s));
  const std::vector<double> a{1.6, 2.0, 5.0};
  for (double v : dual_from_slice(sl, a).f_values) CHECK(v == Approx(1.5).epsilon(1e-3));
}

TEST_CASE("slice from the exponential dual") {
  const double m = 1, sigma = 1;
  DualFunction f;
  f.m = m;
  f.a_grid = shifted(log_grid(1e-3, 1e3, 2000), m);
  for (double a : f.a_grid) f.f_values.push_back(exp_dual(m, sigma, a));
  const std::vector<double> one{1.0};
  CHECK(slice_from_dual(f, one).gamma[0] == Approx(2 * m + 2 * sigma).epsilon(1e-6));
  const std::vector<double> tiny{1e-9};
  CHECK(slice_from_dual(f, tiny).gamma[0] == Approx(m).epsilon(1e-3));
}

TEST_CASE("slice to dual to slice round trip") {
  for (auto [m, sigma] : {std::pair{1.0, 1.0}, std::pair{0.5, 0.5}}) {
    const auto sl = exp_slice({m, sigma}, log_grid(1e-4, 1e4, 2000));
    const auto f = dual_from_slice(sl, shifted(log_grid(1e-3, 1e3, 2000), m));
    const auto s = log_grid(0.01, 100, 400);
    const auto back = slice_from_dual(f, s);
    double err = 0;
    for (std::size_t i = 0; i < s.size(); ++i)
      err = std::max(err, std::abs(back.gamma[i] - (m * (1 + s[i]) + 2 * sigma * std::sqrt(s[i]))));
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("covariance from the dual") {
  for (double a : {1.01, 1.5, 2.0, 7.0, 100.0})
    CHECK(std::abs(cov_from_dual(1, 1, exp_dual(1, 1, a), a)) <= 1e-12);
  for (double a : {1.2, 3.0}) CHECK(cov_from_dual(2, 0.5, 2, a) == Approx(-0.25));
  CHECK(cov_from_dual(1, 1, 3, 2) == Approx(1.0));
}

TEST_CASE("negative covariance condition") {
  const double m = 1, sigma = 1;
  DualFunction f;
  f.m = m;
  f.a_grid = shifted(log_grid(0.05, 5, 200), m);
  SUBCASE("exponential dual sits on the boundary") {
    const auto sl = exp_slice({m, sigma}, log_grid(1e-4, 1e4, 2000));
    const auto d = dual_from_slice(sl, f.a_grid);
    const auto v = neg_cov_condition(d, m, sigma);
    CHECK(v.holds);
    CHECK(v.reversed_holds);
    CHECK(v.boundary);
  }
  SUBCASE("doubled variance term fails everywhere") {
    for (double a : f.a_grid) f.f_values.push_back(m + 2 * sigma * sigma / (a - m));
    const auto v = neg_cov_condition(f, m, sigma);
    CHECK_FALSE(v.holds);
    CHECK(v.reversed_holds);
    for (Relation r : v.points) CHECK(r == Relation::above);
  }
  SUBCASE("smaller shape passes strictly") {
    const auto sl = exp_slice({m, 0.8}, log_grid(1e-4, 1e4, 2000));
    const auto v = neg_cov_condition(dual_from_slice(sl, f.a_grid), m, sigma);
    CHECK(v.holds);
    CHECK_FALSE(v.boundary);
    CHECK(v.max_excess < 0);
  }
}

TEST_CASE("least concave majorant") {
  const std::vector<double> s{0, 1, 2, 3, 4};
  const std::vector<double> y{0, 2, 1, 3, 3};
  const auto h = least_concave_majorant(s, y);
  const std::vector<double> expect{0, 2, 2.5, 3, 3};
  for (std::size_t i = 0; i < s.size(); ++i) CHECK(h[i] == Approx(expect[i]));
  // Already concave input is unchanged.
  const std::vector<double> c{0, 3, 5, 6, 6.5};
  CHECK(least_concave_majorant(s, c) == c);
}

TEST_CASE("noisy slices are regularized before transforming") {
  ShapeSlice sl = exp_slice({1, 1}, log_grid(1e-3, 1e3, 600));
  sl.source = SliceSource::monte_carlo;
  sl.std_error.assign(sl.s_grid.size(), 0.01);
  for (std::size_t i = 0; i < sl.gamma.size(); i += 7) sl.gamma[i] -= 0.05;
  const std::vector<double> a{1.5, 2.0, 3.0};
  const auto f = dual_from_slice(sl, a);
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(f.f_values[i] == Approx(exp_dual(1, 1, a[i])).epsilon(2e-3));
}

TEST_CASE("quadrant comparison") {
  const auto grid = log_grid(0.01, 0.99, 100);
  const auto big = exp_slice({1, 1}, grid);
  const auto small = exp_slice({1, 0.9}, grid);
  auto c = compare_shapes(big, big);
  CHECK(c.dominates);
  CHECK(c.dominated_by);
  c = compare_shapes(small, big);
  CHECK(c.dominates);
  CHECK_FALSE(c.dominated_by);
  CHECK(c.max_violation < 0);
  // g(3, 5) through the slice against the closed form.
  const auto fine = exp_slice({1, 0.9}, log_grid(1e-4, 1, 4000));
  CHECK(evaluate_shape(fine, 3, 5) == Approx(8 + 1.8 * std::sqrt(15.0)).epsilon(1e-5));
  CHECK(evaluate_shape(fine, 5, 3) == evaluate_shape(fine, 3, 5));
  CHECK(evaluate_shape(fine, 2, 0) == Approx(2.0));
  const auto other = exp_slice({1, 1}, log_grid(0.02, 0.99, 100));
  CHECK_THROWS_AS(compare_shapes(small, other), ConfigError);
  const auto wide = exp_slice({1, 1}, log_grid(0.5, 2, 10));
  CHECK_THROWS_AS(compare_shapes(wide, wide), ConfigError);
}

TEST_CASE("homogeneity identity is exact on grid points") {
  const auto sl = exp_slice({0.7, std::sqrt(0.21)}, log_grid(0.01, 1, 50));
  for (std::size_t i = 0; i < sl.s_grid.size(); i += 7)
    for (double x : {0.5, 2.0, 10.0})
      CHECK(evaluate_shape(sl, x, x * sl.s_grid[i]) == Approx(x * sl.gamma[i]).epsilon(1e-14));
}

TEST_CASE("profile to slice") {
  ShapeEstimate est;
  est.x_grid = {0.25, 0.5, 0.75};
  est.mean_over_N = {1.8, 2.0, 1.8};
  est.std_error = {0.1, 0.1, 0.1};
  const auto sl = slice_from_profile(est, 1.0);
  REQUIRE(sl.s_grid.size() == 3);
  CHECK(sl.s_grid[0] == Approx(1.0 / 3));
  CHECK(sl.gamma[0] == Approx(1.8 / 0.75));
  CHECK(sl.std_error[0] == Approx(0.1 / 0.75));
  CHECK(sl.s_grid[2] == Approx(3.0));
  CHECK(sl.source == SliceSource::monte_carlo);
}
