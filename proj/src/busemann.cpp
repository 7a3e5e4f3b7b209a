#include "lpp/busemann.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lpp/errors.hpp"

namespace lpp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void validate(double s, int n) {
  if (!(s > 0) || !std::isfinite(s)) throw ConfigError("busemann: s must be > 0");
  if (n < 4) throw ConfigError("busemann: horizon n must be >= 4");
}

void validate_cov(const BusemannOptions& opts) {
  validate(opts.s, opts.n);
  if (opts.replicas < 2) throw ConfigError("busemann: replicas must be >= 2");
  const Point t = horizon_target(opts.s, opts.n);
  if (t.x < 1 || t.y < 1)
    throw ConfigError("busemann: target " + std::to_string(t.x) + "," +
                      std::to_string(t.y) + " leaves no room for e1 and e2");
}

std::vector<std::vector<double>> run(const WeightLaw& law,
                                     const BusemannOptions& opts, int depth,
                                     std::span<const Point> queries) {
  return opts.serial ? busemann_replicas_serial(law, opts, depth, queries)
                     : busemann_replicas(law, opts, depth, queries);
}

std::vector<double> column_diff(const std::vector<std::vector<double>>& g,
                                std::size_t a, std::size_t b) {
  std::vector<double> out(g.size());
  for (std::size_t r = 0; r < g.size(); ++r) out[r] = g[r][a] - g[r][b];
  return out;
}

IncrementCovReport cov_report(std::string pair, int k,
                              std::span<const double> x,
                              std::span<const double> y,
                              const BusemannOptions& opts) {
  const stats::Estimate c = stats::jackknife_covariance(x, y);
  IncrementCovReport rep;
  rep.pair = std::move(pair);
  rep.k = k;
  rep.cov = c.value;
  rep.std_error = c.std_error;
  rep.replicas = opts.replicas;
  rep.n = opts.n;
  rep.s = opts.s;
  if (opts.replicas >= 100) rep.nonpositive = c.value <= 3 * c.std_error;
  return rep;
}

}  // namespace

Point horizon_target(double s, int n) {
  validate(s, n);
  return {static_cast<int>(std::floor(n / (1 + s))),
          static_cast<int>(std::floor(n * s / (1 + s)))};
}

Point downright_vertex(int k) {
  const int j = k / 2;
  return k % 2 == 0 ? Point{j, -j} : Point{j + 1, -j};
}

BusemannField::BusemannField(Point target, int depth,
                             std::vector<double> weights)
    : target_(target), depth_(depth), w_(std::move(weights)) {
  if (target.x < 0 || target.y < 0 || depth < 0)
    throw ConfigError("busemann field: negative dimensions");
  const int width = target.x + 1;
  const int height = target.y + depth + 1;
  if (w_.size() != static_cast<std::size_t>(width) * height)
    throw ConfigError("busemann field: weight count does not match rectangle");
  g_.resize(w_.size());
  for (int y = target.y; y >= -depth; --y) {
    for (int x = target.x; x >= 0; --x) {
      const Point p{x, y};
      const double right = x < target.x ? g_[index(p + kE1)] : kNegInf;
      const double up = y < target.y ? g_[index(p + kE2)] : kNegInf;
      const double best = p == target ? 0.0 : std::max(right, up);
      g_[index(p)] = w_[index(p)] + best;
    }
  }
}

BusemannField BusemannField::generate(const WeightLaw& law, double s, int n,
                                      std::uint64_t seed, int depth) {
  const Point t = horizon_target(s, n);
  if (depth < 0) throw ConfigError("busemann field: depth must be >= 0");
  const std::size_t width = t.x + 1;
  const std::size_t cells = width * (t.y + depth + 1);
  if (cells > (std::size_t{1} << 30))
    throw ResourceError("busemann field: rectangle exceeds the size guard");
  std::vector<double> w(cells);
  Engine engine = make_stream(seed, "busemann", 0);
  for (int y = t.y; y >= -depth; --y)
    law.fill(engine, std::span<double>(w.data() + (y + depth) * width, width));
  return BusemannField(t, depth, std::move(w));
}

Point BusemannField::arrow(Point p) const {
  if (p.x == target_.x) return kE2;
  if (p.y == target_.y) return kE1;
  return busemann(p, p + kE1) <= busemann(p, p + kE2) ? kE1 : kE2;
}

double BusemannField::path_weight(const LatticePath& path) const {
  const std::vector<Point> v = path.vertices();
  double acc = 0.0;
  for (auto it = v.rbegin(); it != v.rend(); ++it)
    acc = it == v.rbegin() ? weight(*it) : weight(*it) + acc;
  return acc;
}

BusemannField busemann_field(const WeightLaw& law, double s, int n,
                             std::uint64_t seed, int depth) {
  return BusemannField::generate(law, s, n, seed, depth);
}

LatticePath follow_arrows(const BusemannField& field, Point start) {
  if (!field.contains(start))
    throw ConfigError("follow_arrows: start outside the field");
  LatticePath path{start, {}};
  for (Point p = start; p != field.target();) {
    const Point step = field.arrow(p);
    path.steps.push_back(step);
    p = p + step;
  }
  return path;
}

std::vector<double> busemann_replica(const WeightLaw& law, Point target,
                                     int depth, std::span<const Point> queries,
                                     Engine& engine) {
  const int width = target.x + 1;
  for (Point q : queries)
    if (q.x < 0 || q.x > target.x || q.y < -depth || q.y > target.y)
      throw ConfigError("busemann: query point outside the field");
  std::vector<double> row(width + 1, kNegInf);
  std::vector<double> w(width);
  std::vector<double> out(queries.size());
  for (int y = target.y; y >= -depth; --y) {
    law.fill(engine, w);
    for (int x = target.x; x >= 0; --x) {
      const bool corner = x == target.x && y == target.y;
      row[x] = w[x] + (corner ? 0.0 : std::max(row[x + 1], row[x]));
    }
    for (std::size_t q = 0; q < queries.size(); ++q)
      if (queries[q].y == y) out[q] = row[queries[q].x];
  }
  return out;
}

AdjacentSummary adjacent_summary(const WeightLaw& law,
                                 const BusemannOptions& opts) {
  validate_cov(opts);
  const Point q[] = {{0, 0}, kE1, kE2};
  const auto g = run(law, opts, 0, q);
  const auto b_e2 = column_diff(g, 2, 0);  // B(e2, 0)
  const auto b_e1 = column_diff(g, 0, 1);  // B(0, e1)
  const auto e1 = stats::mean_estimate(b_e1);
  const auto e2 = stats::mean_estimate(column_diff(g, 0, 2));
  const MomentSummary mom = moments(law);
  const double rs = std::sqrt(opts.s);
  return {cov_report("B(e2,0)~B(0,e1)", 0, b_e2, b_e1, opts),
          {e1.value, e1.std_error, mom.mean + mom.sd * rs},
          {e2.value, e2.std_error, mom.mean + mom.sd / rs}};
}

IncrementCovReport adjacent_cov(const WeightLaw& law,
                                const BusemannOptions& opts) {
  return adjacent_summary(law, opts).cov;
}

DownRightCov downright_cov(const WeightLaw& law, const BusemannOptions& opts,
                           int k_max) {
  validate_cov(opts);
  if (k_max < 1) throw ConfigError("downright_cov: k_max must be >= 1");
  const Point t = horizon_target(opts.s, opts.n);
  if (downright_vertex(k_max + 1).x > t.x)
    throw ConfigError("downright_cov: staircase does not fit under the target");
  const int depth = -downright_vertex(k_max + 1).y;
  // Queries: e2, then v_0 .. v_{k_max + 1}; v_0 = 0 and v_1 = e1.
  std::vector<Point> q{kE2};
  for (int k = 0; k <= k_max + 1; ++k) q.push_back(downright_vertex(k));
  const auto g = run(law, opts, depth, q);
  const auto b_e2 = column_diff(g, 0, 1);
  const auto b_e1 = column_diff(g, 1, 2);
  DownRightCov out;
  for (int k = 0; k <= k_max; ++k) {
    const auto inc = column_diff(g, k + 1, k + 2);
    const std::string tail = "~B(v" + std::to_string(k) + ",v" +
                             std::to_string(k + 1) + ")";
    if (k >= 1) out.with_e1.push_back(cov_report("B(0,e1)" + tail, k, b_e1, inc, opts));
    out.with_e2.push_back(cov_report("B(e2,0)" + tail, k, b_e2, inc, opts));
  }
  return out;
}

std::pair<MeanCheck, MeanCheck> increment_mean_check(
    const WeightLaw& law, const BusemannOptions& opts) {
  const AdjacentSummary sum = adjacent_summary(law, opts);
  return {sum.e1, sum.e2};
}

VarianceBound variance_bound_check(const WeightLaw& law,
                                   const BusemannOptions& opts,
                                   int path_length) {
  validate_cov(opts);
  if (path_length < 1)
    throw ConfigError("variance_bound_check: path length must be >= 1");
  const Point t = horizon_target(opts.s, opts.n);
  const Point end = downright_vertex(path_length);
  if (end.x > t.x)
    throw ConfigError("variance_bound_check: path does not fit the field");
  const Point q[] = {{0, 0}, kE1, end};
  const auto g = run(law, opts, -end.y, q);
  const auto far = column_diff(g, 0, 2);
  const auto near = column_diff(g, 0, 1);
  const double nv = path_length;
  const auto lhs = stats::jackknife_variance(far);
  const auto one = stats::jackknife_variance(near);
  const auto ratio = stats::jackknife_variance_ratio(far, near);
  VarianceBound out;
  out.lhs = lhs.value;
  out.lhs_error = lhs.std_error;
  out.rhs = nv * one.value;
  out.rhs_error = nv * one.std_error;
  out.ratio = ratio.value / nv;
  out.ratio_error = ratio.std_error / nv;
  out.verdict = out.ratio <= 1 + 3 * out.ratio_error;
  return out;
}

}  // namespace lpp
