#include "lpp/coarsegrain.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "lpp/errors.hpp"

namespace lpp {

namespace {

std::int64_t floor_div(Rational q) {
  std::int64_t f = q.numerator() / q.denominator();
  if (q.numerator() < 0 && f * q.denominator() != q.numerator()) --f;
  return f;
}

std::int64_t ceil_div(Rational q) { return -floor_div(-q); }

std::int64_t parse_int(std::string_view t) {
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size() || t.empty())
    throw ConfigError("not an integer: '" + std::string(t) + "'");
  return v;
}

std::uint64_t key(Point p) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(p.x)) << 32) |
         static_cast<std::uint32_t>(p.y);
}

struct PointHash {
  std::size_t operator()(Point p) const { return std::hash<std::uint64_t>{}(key(p)); }
};

bool is_backward(Point d) { return d == Point{-1, 0} || d == Point{0, -1}; }

bool is_unit(Point d) {
  return std::abs(d.x) + std::abs(d.y) == 1;
}

std::uint64_t add_checked(std::uint64_t a, std::uint64_t b) {
  std::uint64_t out;
  if (__builtin_add_overflow(a, b, &out))
    throw ResourceError("enumerate_paths: count overflows 64 bits");
  return out;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  if (const auto slash = text.find('/'); slash != std::string_view::npos) {
    const auto den = parse_int(text.substr(slash + 1));
    if (den == 0) throw ConfigError("zero denominator in '" + std::string(text) + "'");
    return {parse_int(text.substr(0, slash)), den};
  }
  if (const auto dot = text.find('.'); dot != std::string_view::npos) {
    const std::string_view frac = text.substr(dot + 1);
    if (frac.size() > 15) throw ConfigError("too many decimals: '" + std::string(text) + "'");
    std::int64_t scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    const std::string_view whole = text.substr(0, dot);
    const std::int64_t w = whole.empty() ? 0 : parse_int(whole);
    const std::int64_t f = frac.empty() ? 0 : parse_int(frac);
    if (f < 0) throw ConfigError("bad rational '" + std::string(text) + "'");
    const bool negative = !whole.empty() && whole.front() == '-';
    return Rational(w) + Rational(negative ? -f : f, scale);
  }
  return Rational(parse_int(text));
}

std::string format_rational(Rational q) {
  if (q.denominator() == 1) return std::to_string(q.numerator());
  return std::to_string(q.numerator()) + "/" + std::to_string(q.denominator());
}

void validate(const CoarseGridSpec& spec) {
  auto fail = [](const std::string& what) { throw ConfigError("coarse grid: " + what); };
  if (spec.N < 1) fail("N must be >= 1");
  if (spec.s <= 0) fail("s must be > 0");
  if (spec.r <= 0 || spec.r > 1) fail("r must lie in (0, 1]");
  if (spec.M < 1 || spec.L < 1) fail("M and L must be >= 1");
  if (spec.M % spec.L != 0) fail("L must divide M");
  if (2 * spec.L > spec.M) fail("2L must not exceed M");
  if ((spec.r * spec.M).denominator() != 1) fail("M r must be an integer");
  if ((spec.r * spec.L).denominator() != 1) fail("L r must be an integer");
  if ((spec.s * spec.N).denominator() != 1) fail("N s must be an integer");
  if (!(spec.b_N > 0)) fail("b_N must be > 0");
}

CoarseGrid::CoarseGrid(const CoarseGridSpec& spec) : spec_(spec) {
  validate(spec);
  a_ = spec.r.numerator();
  b_ = spec.r.denominator();
  ns_ = static_cast<int>((spec.s * spec.N).numerator());
  lr_ = static_cast<int>((spec.r * spec.L).numerator());
}

std::optional<int> CoarseGrid::line_of(Point p) const {
  const std::int64_t lev = level(p);
  const std::int64_t step = a_ * spec_.M;
  if (lev < 0 || lev % step != 0) return std::nullopt;
  return static_cast<int>(lev / step);
}

bool CoarseGrid::is_coarse(Point p) const {
  const auto k = line_of(p);
  if (!k || p.x < 0 || p.y < 0) return false;
  const int d = *k * spec_.M - p.x;
  return d >= 0 && d % spec_.L == 0;
}

int CoarseGrid::zone_of(Point p) const {
  const std::int64_t lev = level(p);
  if (lev < 0) return 0;
  const std::int64_t k = lev / (a_ * spec_.M);
  if (k < 1 || lev - line_level(static_cast<int>(k)) > a_ * spec_.L) return 0;
  return static_cast<int>(k);
}

std::vector<Point> CoarseGrid::coarse_points(int k) const {
  std::vector<Point> out;
  for (int q = 0; q * spec_.L <= k * spec_.M; ++q)
    out.push_back({k * spec_.M - q * spec_.L, q * lr_});
  return out;
}

std::vector<Point> CoarseGrid::zone_points(int k) const {
  std::vector<Point> out;
  for (int y = 0; y <= ns_ + lr_; ++y)
    for (int x = 0; x <= spec_.N + spec_.L; ++x)
      if (zone_of({x, y}) == k) out.push_back({x, y});
  return out;
}

std::string admissibility_violation(const LatticePath& path,
                                    const CoarseGridSpec& spec) {
  const CoarseGrid grid(spec);
  const std::vector<Point> v = path.vertices();
  if (v.front() != Point{0, 0}) return "path must start at the origin";
  if (v.back() != grid.end()) return "path must end at (N, N s)";
  std::unordered_set<Point, PointHash> seen;
  const int budget = 2 * spec.L - 1;
  int run_zone = -1;
  std::size_t run_entry = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Point p = v[i];
    if (p.x < 0 || p.y < 0) return "path leaves the quadrant";
    if (!seen.insert(p).second) return "path repeats a vertex";
    const int zone = grid.zone_of(p);
    if (zone != run_zone) {
      run_zone = zone;
      run_entry = i;
    }
    if (i + 1 < v.size()) {
      const auto k = grid.line_of(p);
      if (k && *k >= 1 && !grid.is_coarse(p))
        return "meets line " + std::to_string(*k) + " off the coarse grid";
    }
    if (i == 0) continue;
    const Point d = p - v[i - 1];
    if (!is_unit(d)) return "step is not a unit step";
    if (is_backward(d)) {
      const int from = grid.zone_of(v[i - 1]);
      if (from == 0 || from != zone) return "backward step outside a free zone";
      if (static_cast<int>(i - run_entry) > budget)
        return "detour in zone " + std::to_string(zone) + " exceeds 2L";
    }
    const std::int64_t lo = std::min(grid.level(v[i - 1]), grid.level(p));
    const std::int64_t hi = std::max(grid.level(v[i - 1]), grid.level(p));
    const std::int64_t step = grid.line_level(1);
    const std::int64_t next = (lo >= 0 ? lo / step : -1) + 1;
    if (next >= 1 && next * step < hi)
      return "step jumps across line " + std::to_string(next);
  }
  return {};
}

bool is_admissible(const LatticePath& path, const CoarseGridSpec& spec) {
  return admissibility_violation(path, spec).empty();
}

LatticePath modify_path(const LatticePath& gamma, const CoarseGridSpec& spec) {
  const CoarseGrid grid(spec);
  if (gamma.start != Point{0, 0} || gamma.end() != grid.end() ||
      !gamma.is_up_right())
    throw ConfigError("modify_path: need an up/right path from 0 to (N, N s)");
  const std::vector<Point> v = gamma.vertices();
  const std::size_t last = v.size() - 1;
  const int M = spec.M, L = spec.L;
  const std::int64_t a = spec.r.numerator(), b = spec.r.denominator();
  const int lr = static_cast<int>((spec.r * L).numerator());

  std::vector<Point> out;
  auto walk = [&](Point to) {
    while (out.back() != to) {
      Point p = out.back();
      if (p.x != to.x)
        p.x += p.x < to.x ? 1 : -1;
      else
        p.y += p.y < to.y ? 1 : -1;
      out.push_back(p);
    }
  };

  std::size_t cursor = 0;
  for (int k = 1; grid.line_level(k) <= grid.level(grid.end()); ++k) {
    const std::int64_t lk = grid.line_level(k);
    std::size_t i = cursor;
    while (grid.level(v[i]) < lk) ++i;
    Rational d_star;  // k M - x at the crossing
    if (grid.level(v[i]) == lk) {
      if (grid.is_coarse(v[i]) || i == last) continue;
      d_star = Rational(k * M - v[i].x);
    } else if (v[i] - v[i - 1] == kE1) {
      d_star = Rational(k * M) - Rational(lk - b * v[i].y, a);
    } else {
      d_star = Rational(k * M - v[i].x);
    }
    const int q = static_cast<int>(floor_div(d_star / L));
    const Point c2{k * M - q * L, q * lr};
    const Point c1{k * M - (q + 1) * L, (q + 1) * lr};

    std::size_t vi = cursor;
    while (!(v[vi].x >= c1.x && v[vi].y >= c2.y)) ++vi;
    std::size_t ui = last;
    while (!(v[ui].x <= c2.x && v[ui].y <= c1.y)) --ui;
    const Point u = v[ui];

    out.insert(out.end(), v.begin() + cursor, v.begin() + vi + 1);
    if (v[vi].y == c2.y) {
      walk(c2);
      walk({c2.x, u.y});
      walk(u);
    } else {
      walk(c1);
      walk({u.x, c1.y});
      walk(u);
    }
    cursor = ui + 1;
    if (cursor > last) break;
  }
  out.insert(out.end(), v.begin() + std::min(cursor, v.size()), v.end());

  LatticePath result{out.front(), {}};
  for (std::size_t j = 1; j < out.size(); ++j)
    result.steps.push_back(out[j] - out[j - 1]);
  return result;
}

std::uint64_t enumerate_paths(const CoarseGridSpec& spec,
                              std::uint64_t node_limit) {
  const CoarseGrid grid(spec);
  const Point end = grid.end();
  const int budget = 2 * spec.L - 1;
  // Levels never drop below that of a vertex outside every zone or at a
  // zone entry, so such vertices above the end level are dead.
  const std::int64_t end_level = grid.level(end);
  const Point dirs[] = {kE1, kE2, {-1, 0}, {0, -1}};
  std::uint64_t nodes = 0;
  std::unordered_map<Point, std::uint64_t, PointHash> memo;
  using Visited = std::unordered_set<Point, PointHash>;

  auto tick = [&] {
    if (++nodes > node_limit)
      throw ResourceError("enumerate_paths: search exceeds the node limit");
  };
  auto step_ok = [&](Point p, Point q) {
    if (q.x < 0 || q.y < 0) return false;
    const std::int64_t lo = std::min(grid.level(p), grid.level(q));
    const std::int64_t hi = std::max(grid.level(p), grid.level(q));
    const std::int64_t unit = grid.line_level(1);
    const std::int64_t next = (lo >= 0 ? lo / unit : -1) + 1;
    if (next >= 1 && next * unit < hi) return false;
    const auto k = grid.line_of(q);
    return !(k && *k >= 1 && !grid.is_coarse(q) && q != end);
  };

  std::function<std::uint64_t(Point)> fresh;
  std::function<std::uint64_t(Point, int, int, Visited&)> in_zone;

  in_zone = [&](Point p, int zone, int steps, Visited& visited) -> std::uint64_t {
    tick();
    if (p == end) return 1;
    std::uint64_t total = 0;
    for (Point d : dirs) {
      const Point q = p + d;
      if (!step_ok(p, q) || visited.count(q)) continue;
      const int qz = grid.zone_of(q);
      if (is_backward(d) && (qz != zone || steps + 1 > budget)) continue;
      if (qz == zone) {
        visited.insert(q);
        total = add_checked(total, in_zone(q, zone, steps + 1, visited));
        visited.erase(q);
      } else {
        total = add_checked(total, fresh(q));
      }
    }
    return total;
  };

  fresh = [&](Point p) -> std::uint64_t {
    if (p == end) return 1;
    const int zone = grid.zone_of(p);
    if (grid.level(p) > end_level) return 0;
    if (auto it = memo.find(p); it != memo.end()) return it->second;
    tick();
    std::uint64_t total = 0;
    if (zone == 0) {
      for (Point d : {kE1, kE2})
        if (step_ok(p, p + d)) total = add_checked(total, fresh(p + d));
    } else {
      Visited visited{p};
      total = in_zone(p, zone, 0, visited);
    }
    memo.emplace(p, total);
    return total;
  };

  return fresh({0, 0});
}

CountBound count_bound_log(const CoarseGridSpec& spec) {
  validate(spec);
  const Rational r = spec.r;
  const double n = static_cast<double>(ceil_div(Rational(2 * spec.M) * r / (1 + r)));
  const double log_binom =
      std::lgamma(n + 1) - 2 * std::lgamma(n / 2 + 1);
  CountBound out;
  out.segment_log = std::log(static_cast<double>(spec.M) / spec.L) + log_binom +
                    2 * spec.L * std::log(4.0);
  out.exponent = boost::rational_cast<double>(Rational(spec.N) * (spec.s + r) /
                                              (Rational(spec.M) * r));
  out.log_bound = out.exponent * out.segment_log;
  out.asymptotic = boost::rational_cast<double>(Rational(spec.N) * (spec.s + r) /
                                                (1 + r)) *
                   std::log(4.0);
  return out;
}

int crossings(int N, Rational s, Rational r, int M) {
  if (N < 1 || s <= 0 || r <= 0 || M < 1)
    throw ConfigError("crossings: arguments must be positive");
  return static_cast<int>(floor_div(Rational(N, M)) +
                          floor_div(Rational(N) * s / (r * M)));
}

int crossings_geometric(int N, Rational s, Rational r, int M) {
  if (N < 1 || s <= 0 || r <= 0 || M < 1)
    throw ConfigError("crossings: arguments must be positive");
  return static_cast<int>(floor_div((Rational(N) + Rational(N) * s / r) / M));
}

int crossings_along(const LatticePath& path, Rational r, int M) {
  const std::int64_t a = r.numerator(), b = r.denominator();
  const std::int64_t unit = a * M;
  auto level = [&](Point p) { return b * p.y + a * p.x; };
  std::vector<std::int64_t> met;
  const std::vector<Point> v = path.vertices();
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::int64_t lev = level(v[i]);
    if (lev > 0 && lev % unit == 0) met.push_back(lev / unit);
    if (i == 0) continue;
    const std::int64_t lo = std::min(lev, level(v[i - 1]));
    const std::int64_t hi = std::max(lev, level(v[i - 1]));
    for (std::int64_t k = std::max<std::int64_t>(1, lo / unit + 1); k * unit < hi; ++k)
      met.push_back(k);
  }
  std::sort(met.begin(), met.end());
  return static_cast<int>(std::unique(met.begin(), met.end()) - met.begin());
}

double good_tail_bound(int N, double s, double b_N, double c, double lambda) {
  if (!(c > 0 && lambda > 0)) throw ConfigError("good_tail_bound: c and lambda must be > 0");
  return c * static_cast<double>(N) * N * s * std::exp(-lambda * b_N);
}

double good_complement_frequency(const WeightLaw& law, int N, double s,
                                 double b_N, int replicas, std::uint64_t seed) {
  if (N < 1 || !(s > 0) || replicas < 1)
    throw ConfigError("good_complement_frequency: bad arguments");
  const std::size_t cells =
      static_cast<std::size_t>(N + 1) * (static_cast<std::size_t>(std::floor(N * s)) + 1);
  std::vector<double> w(cells);
  int bad = 0;
  for (int r = 0; r < replicas; ++r) {
    Engine engine = make_stream(seed, "good", r);
    law.fill(engine, w);
    if (std::any_of(w.begin(), w.end(), [&](double x) { return std::abs(x) > b_N; }))
      ++bad;
  }
  return static_cast<double>(bad) / replicas;
}

bool schedule_valid(double alpha, double beta, double gamma) {
  return alpha > 0 && beta > 0 && gamma > 0 && alpha + gamma < beta && beta < 1;
}

LatticePath random_up_right_path(int width, int height, Engine& engine) {
  LatticePath path{{0, 0}, {}};
  path.steps.assign(width, kE1);
  path.steps.insert(path.steps.end(), height, kE2);
  std::shuffle(path.steps.begin(), path.steps.end(), engine);
  return path;
}

ModifyTrials verify_modify(const CoarseGridSpec& spec, const WeightLaw& law,
                           int trials, std::uint64_t seed) {
  const CoarseGrid grid(spec);
  const Point end = grid.end();
  const int lr = static_cast<int>((spec.r * spec.L).numerator());
  const Rational lines = Rational(spec.N) * (spec.r + spec.s) / (spec.r * spec.M);
  const Rational length_bound =
      Rational(spec.N) * (1 + spec.s) + Rational(2 * spec.L) * lines;
  const double weight_slack = 4 * spec.L * spec.b_N * boost::rational_cast<double>(lines);
  ModifyTrials out;
  for (int t = 0; t < trials; ++t) {
    Engine engine = make_stream(seed, "modify", t);
    const LatticePath gamma = random_up_right_path(end.x, end.y, engine);
    WeightGrid w = WeightGrid::generate(law, end.x + spec.L + 1, end.y + lr + 1,
                                        derive_seed(seed, "modify-weights", t));
    for (int y = 0; y < w.height(); ++y)
      for (int x = 0; x < w.width(); ++x)
        w.at(x, y) = std::clamp(w.at(x, y), -spec.b_N, spec.b_N);
    const LatticePath modified = modify_path(gamma, spec);
    auto weight = [&](const LatticePath& p) {
      double sum = 0.0;
      for (Point q : p.vertices()) sum += w.at(q);
      return sum;
    };
    ++out.trials;
    if (is_admissible(modified, spec)) ++out.admissible;
    if (Rational(static_cast<std::int64_t>(modified.steps.size())) <= length_bound)
      ++out.length_ok;
    const double w0 = weight(gamma), w1 = weight(modified);
    if (w1 >= w0 - weight_slack - 1e-9 * (1 + std::abs(w0))) ++out.weight_ok;
    if (modified.steps != gamma.steps) ++out.modified;
  }
  return out;
}

}  // namespace lpp
