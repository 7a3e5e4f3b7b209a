#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "lpp/busemann.hpp"
#include "lpp/errors.hpp"
#include "lpp/stats.hpp"

using namespace lpp;
using doctest::Approx;

namespace {

const WeightLaw kExp{Exponential{1}};
const WeightLaw kBern{Bernoulli{0.7}};

WeightGrid as_grid(const BusemannField& f) {
  const Point t = f.target();
  const int d = f.depth();
  std::vector<double> w;
  for (int y = -d; y <= t.y; ++y)
    for (int x = 0; x <= t.x; ++x) w.push_back(f.weight({x, y}));
  return WeightGrid(t.x + 1, t.y + d + 1, w);
}

BusemannOptions small(double s, int n, int replicas, std::uint64_t seed = 1) {
  BusemannOptions o;
  o.s = s;
  o.n = n;
  o.replicas = replicas;
  o.seed = seed;
  return o;
}

}  // namespace

TEST_CASE("horizon targets and the staircase") {
  CHECK(horizon_target(1, 1000) == Point{500, 500});
  CHECK(horizon_target(0.5, 300) == Point{200, 100});
  CHECK(horizon_target(3, 10) == Point{2, 7});
  CHECK_THROWS_AS(horizon_target(0, 100), ConfigError);
  CHECK_THROWS_AS(horizon_target(1, 3), ConfigError);
  CHECK(downright_vertex(0) == Point{0, 0});
  for (int k = 1; k < 20; ++k) {
    const Point step = downright_vertex(k) - downright_vertex(k - 1);
    CHECK(step == (k % 2 == 1 ? kE1 : Point{0, -1}));
  }
}

TEST_CASE("reverse passage times match a forward dynamic program") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const BusemannField f = busemann_field(kBern, 1.5, 30, seed, 3);
    const WeightGrid g = as_grid(f);
    const Point t = f.target();
    for (int x = 0; x <= t.x; x += 2)
      for (int y = -3; y <= t.y; y += 3)
        CHECK(f.passage({x, y}) ==
              Approx(passage_time(g, {x, y + 3}, {t.x, t.y + 3})).epsilon(1e-13));
  }
}

TEST_CASE("exact identities on random fields") {
  Engine e = make_stream(31, "test", 0);
  int fields = 0;
  for (const WeightLaw& law :
       {kExp, kBern, WeightLaw(Uniform{-1, 1}), WeightLaw(Geometric{0.4}),
        WeightLaw(TwoPoint{2, 5, 0.3})}) {
    for (int rep = 0; rep < 4; ++rep, ++fields) {
      const BusemannField f = busemann_field(law, 0.5 + rep, 60 + 40 * rep, fields, 2);
      const Point t = f.target();
      std::uniform_int_distribution<int> ux(0, t.x), uy(-2, t.y);
      auto pick = [&] { return Point{ux(e), uy(e)}; };
      for (int i = 0; i < 200; ++i) {
        const Point a = pick(), b = pick(), c = pick();
        CHECK(f.busemann(a, a) == 0.0);
        CHECK(std::abs(f.busemann(a, b) + f.busemann(b, c) - f.busemann(a, c)) <= 1e-12);
        if (a.x < t.x && a.y < t.y) {
          const double rec = std::min(f.busemann(a, a + kE1), f.busemann(a, a + kE2));
          CHECK(std::abs(rec - f.weight(a)) <= 1e-12);
        }
      }
      for (Point s : {Point{0, 0}, Point{0, -2}, pick()}) {
        const LatticePath path = follow_arrows(f, s);
        CHECK(path.is_up_right());
        CHECK(path.end() == t);
        CHECK(f.path_weight(path) == f.passage(s));
      }
    }
  }
}

TEST_CASE("arrows on constant weights go right first") {
  const Point t{4, 3};
  const BusemannField f(t, 0, std::vector<double>(20, 1.0));
  const LatticePath p = follow_arrows(f, {0, 0});
  const std::vector<Point> expect{kE1, kE1, kE1, kE1, kE2, kE2, kE2};
  CHECK(p.steps == expect);
}

TEST_CASE("depth rows never change the rows above") {
  const BusemannField a = busemann_field(kExp, 1, 40, 9, 0);
  const BusemannField b = busemann_field(kExp, 1, 40, 9, 5);
  const Point t = a.target();
  for (int y = 0; y <= t.y; ++y)
    for (int x = 0; x <= t.x; ++x) {
      CHECK(a.weight({x, y}) == b.weight({x, y}));
      CHECK(a.passage({x, y}) == b.passage({x, y}));
    }
}

TEST_CASE("streaming replica reproduces the stored field") {
  const int depth = 4;
  const BusemannField f = BusemannField::generate(kExp, 0.7, 80, 12, depth);
  std::vector<Point> q{{0, 0}, {1, 0}, {0, 1}, {3, -4}, f.target(), {7, 2}};
  Engine e = make_stream(12, "busemann", 0);
  const auto got = busemann_replica(kExp, f.target(), depth, q, e);
  for (std::size_t i = 0; i < q.size(); ++i) CHECK(got[i] == f.passage(q[i]));
}

TEST_CASE("replica kernels are thread independent and match the serial one") {
  auto o = small(1, 60, 40, 3);
  const std::vector<Point> q{{0, 0}, {1, 0}, {0, 1}};
  o.threads = 1;
  const auto a = busemann_replicas(kBern, o, 0, q);
  o.threads = 4;
  const auto b = busemann_replicas(kBern, o, 0, q);
  const auto c = busemann_replicas_serial(kBern, o, 0, q);
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("two replicas give no verdict") {
  const auto r = adjacent_cov(kExp, small(1, 50, 2));
  CHECK_FALSE(r.nonpositive.has_value());
  CHECK(std::isinf(r.std_error));
  CHECK_THROWS_AS(adjacent_cov(kExp, small(1, 50, 1)), ConfigError);
}

TEST_CASE("down/right covariances share replicas with the adjacent pair") {
  const auto o = small(1, 120, 300, 5);
  const auto adj = adjacent_cov(kBern, o);
  const auto dr = downright_cov(kBern, o, 4);
  REQUIRE(dr.with_e2.size() == 5);
  REQUIRE(dr.with_e1.size() == 4);
  CHECK(dr.with_e2[0].cov == Approx(adj.cov).epsilon(1e-12));
  CHECK(dr.with_e2[0].std_error == Approx(adj.std_error).epsilon(1e-12));
  for (const auto& r : dr.with_e1) {
    CHECK(std::isfinite(r.cov));
    CHECK(r.std_error > 0);
  }
  CHECK_THROWS_AS(downright_cov(kBern, o, 0), ConfigError);
}

TEST_CASE("exponential down/right increments are nearly uncorrelated") {
  // At n = 300 the horizon itself correlates the increments slightly
  // negatively: 2e4 replicas put every covariance in [-0.12, 0], against
  // increment variances of 4.
  const auto dr = downright_cov(kExp, small(1, 300, 2000, 8), 3);
  for (const auto* fam : {&dr.with_e1, &dr.with_e2})
    for (const auto& r : *fam) {
      CHECK(r.cov <= 3 * r.std_error);
      CHECK(r.cov >= -0.2 - 3 * r.std_error);
    }
}

TEST_CASE("exponential increments are exponential with the gradient means") {
  const auto o = small(1, 400, 2000, 17);
  const std::vector<Point> q{{0, 0}, {1, 0}};
  const auto rows = busemann_replicas(kExp, o, 0, q);
  std::vector<double> inc;
  for (const auto& r : rows) inc.push_back(r[0] - r[1]);
  std::sort(inc.begin(), inc.end());
  // Exponential with mean m + sigma sqrt(s) = 2.
  const double d = stats::ks_statistic(inc, [](double x) { return 1 - std::exp(-x / 2); });
  CHECK(d < 1.628 / std::sqrt(static_cast<double>(inc.size())));

  const auto [e1, e2] = increment_mean_check(kExp, o);
  CHECK(e1.reference == 2.0);
  CHECK(e2.reference == 2.0);
  CHECK(std::abs(e1.estimate - 2) <= 3 * e1.std_error + 0.05);
  CHECK(std::abs(e2.estimate - 2) <= 3 * e2.std_error + 0.05);
}

TEST_CASE("mirrored directions swap the increment means") {
  const auto [a1, a2] = increment_mean_check(kExp, small(2, 300, 1000, 2));
  const auto [b1, b2] = increment_mean_check(kExp, small(0.5, 300, 1000, 3));
  CHECK(std::abs(a1.estimate - b2.estimate) <= 3 * std::hypot(a1.std_error, b2.std_error));
  CHECK(std::abs(a2.estimate - b1.estimate) <= 3 * std::hypot(a2.std_error, b1.std_error));
  CHECK(a1.reference == Approx(1 + std::sqrt(2.0)));
  CHECK(a2.reference == Approx(1 + 1 / std::sqrt(2.0)));
  const auto [c1, c2] = increment_mean_check(kBern, small(1, 100, 50));
  CHECK(c1.reference == Approx(0.7 + std::sqrt(0.21)));
  CHECK(c1.reference == Approx(1.15826).epsilon(1e-5));
}

TEST_CASE("increments are stationary away from the boundary") {
  const auto o = small(1, 400, 1500, 23);
  const std::vector<Point> q{{0, 0}, {1, 0}, {6, 6}, {7, 6}};
  const auto rows = busemann_replicas(kExp, o, 0, q);
  std::vector<double> u, v;
  for (const auto& r : rows) {
    u.push_back(r[0] - r[1]);
    v.push_back(r[2] - r[3]);
  }
  const auto mu = stats::mean_estimate(u), mv = stats::mean_estimate(v);
  CHECK(std::abs(mu.value - mv.value) <= 3 * std::hypot(mu.std_error, mv.std_error));
  const auto vu = stats::jackknife_variance(u), vv = stats::jackknife_variance(v);
  CHECK(std::abs(vu.value - vv.value) <= 3 * std::hypot(vu.std_error, vv.std_error));
}

TEST_CASE("variance bound") {
  SUBCASE("one step is an identity") {
    const auto vb = variance_bound_check(kBern, small(1, 100, 200), 1);
    CHECK(vb.lhs == vb.rhs);
    CHECK(vb.ratio == 1.0);
    CHECK(vb.verdict);
  }
  SUBCASE("exponential increments nearly add up") {
    // Finite horizons pull the ratio a few percent below 1 (0.96 at n = 300).
    const auto vb = variance_bound_check(kExp, small(1, 400, 2000, 4), 4);
    CHECK(vb.verdict);
    CHECK(vb.ratio <= 1 + 3 * vb.ratio_error);
    CHECK(vb.ratio >= 0.9 - 3 * vb.ratio_error);
  }
  SUBCASE("Bernoulli is reported") {
    const auto vb = variance_bound_check(kBern, small(1, 200, 500, 4), 6);
    CHECK(std::isfinite(vb.ratio));
    CHECK(vb.ratio_error > 0);
  }
}

TEST_CASE("geodesics from neighbouring starts coalesce") {
  int merged = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const BusemannField f = busemann_field(kExp, 1, 400, seed);
    const auto a = follow_arrows(f, {1, 0}).vertices();
    const auto b = follow_arrows(f, {0, 1}).vertices();
    std::set<std::pair<int, int>> seen;
    for (Point p : a) seen.insert({p.x, p.y});
    for (Point p : b)
      if (p != f.target() && seen.count({p.x, p.y})) {
        ++merged;
        break;
      }
  }
  CHECK(merged > 50);
}
