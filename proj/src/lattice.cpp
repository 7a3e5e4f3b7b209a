#include "lpp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <new>
#include <string>

#include "lpp/errors.hpp"
#include "shape_common.hpp"

namespace lpp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Size guard for dense tables: 2^31 cells (16 GiB of doubles).
constexpr std::size_t kMaxCells = std::size_t{1} << 31;

std::size_t checked_cells(int width, int height) {
  if (width <= 0 || height <= 0)
    throw ConfigError("grid dimensions must be positive");
  const std::size_t cells = static_cast<std::size_t>(width) * height;
  if (cells > kMaxCells)
    throw ResourceError("grid of " + std::to_string(width) + "x" +
                        std::to_string(height) + " exceeds the size guard");
  return cells;
}

template <class T>
std::vector<T> allocate(std::size_t n, T value) {
  try {
    return std::vector<T>(n, value);
  } catch (const std::bad_alloc&) {
    throw ResourceError("out of memory allocating " + std::to_string(n) +
                        " cells");
  }
}

}  // namespace

std::vector<Point> LatticePath::vertices() const {
  std::vector<Point> v{start};
  v.reserve(steps.size() + 1);
  for (Point d : steps) v.push_back(v.back() + d);
  return v;
}

Point LatticePath::end() const {
  Point p = start;
  for (Point d : steps) p = p + d;
  return p;
}

bool LatticePath::is_up_right() const {
  return std::all_of(steps.begin(), steps.end(),
                     [](Point d) { return d == kE1 || d == kE2; });
}

WeightGrid::WeightGrid(int width, int height, std::vector<double> weights)
    : width_(width), height_(height), w_(std::move(weights)) {
  if (w_.size() != checked_cells(width, height))
    throw ConfigError("weights.size() must equal width * height");
}

WeightGrid WeightGrid::generate(const WeightLaw& law, int width, int height,
                                std::uint64_t seed) {
  auto w = allocate(checked_cells(width, height), 0.0);
  Engine engine = make_stream(seed, "grid", 0);
  law.fill(engine, w);
  return WeightGrid(width, height, std::move(w));
}

std::vector<double> PassageField::antidiagonal(int d) const {
  std::vector<double> out;
  const int x0 = std::max(0, d - (height_ - 1));
  const int x1 = std::min(d, width_ - 1);
  for (int x = x0; x <= x1; ++x) out.push_back(at(x, d - x));
  return out;
}

PassageField passage_field(const WeightGrid& grid) {
  const int w = grid.width(), h = grid.height();
  auto g = allocate(checked_cells(w, h), 0.0);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double left = x > 0 ? g[y * std::size_t(w) + x - 1] : kNegInf;
      const double below = y > 0 ? g[(y - 1) * std::size_t(w) + x] : kNegInf;
      const double best = (x == 0 && y == 0) ? 0.0 : std::max(left, below);
      g[y * std::size_t(w) + x] = grid.at(x, y) + best;
    }
  }
  return PassageField(w, h, std::move(g));
}

std::vector<double> antidiagonal_streaming(const WeightGrid& grid, int d) {
  const int w = grid.width(), h = grid.height();
  if (d < 0 || d > w + h - 2) return {};
  std::vector<double> row(w, kNegInf);
  std::vector<double> out;
  const int last_row = std::min(h - 1, d);
  for (int y = 0; y <= last_row; ++y) {
    for (int x = 0; x < w; ++x) {
      const double left = x > 0 ? row[x - 1] : kNegInf;
      const double best = (x == 0 && y == 0) ? 0.0 : std::max(left, row[x]);
      row[x] = grid.at(x, y) + best;
    }
    const int x = d - y;
    if (x >= 0 && x < w) out.push_back(row[x]);
  }
  std::reverse(out.begin(), out.end());
  return out;
}

double passage_time(const WeightGrid& grid, Point from, Point to) {
  if (!grid.contains(from) || !grid.contains(to))
    throw ConfigError("passage_time: endpoint outside grid");
  if (to.x < from.x || to.y < from.y) return kNegInf;
  const int w = to.x - from.x + 1;
  std::vector<double> row(w, kNegInf);
  for (int y = from.y; y <= to.y; ++y) {
    for (int i = 0; i < w; ++i) {
      const double left = i > 0 ? row[i - 1] : kNegInf;
      const bool origin = i == 0 && y == from.y;
      row[i] = grid.at(from.x + i, y) + (origin ? 0.0 : std::max(left, row[i]));
    }
  }
  return row[w - 1];
}

ExpShapeParams exp_shape_params(const WeightLaw& law) {
  const MomentSummary mom = moments(law);
  return {mom.mean, mom.sd};
}

double g_exp(ExpShapeParams params, double x, double y) {
  return params.m * (x + y) + 2 * params.sigma * std::sqrt(x * y);
}

std::vector<double> interior_grid(int count) {
  std::vector<double> xs(count);
  for (int i = 0; i < count; ++i)
    xs[i] = static_cast<double>(i + 1) / (count + 1);
  return xs;
}

Point shape_target(int N, double x) {
  return {static_cast<int>(std::floor(N * x)),
          static_cast<int>(std::floor(N * (1 - x)))};
}

std::vector<double> shape_replica(const WeightLaw& law, int N,
                                  std::span<const double> x_grid,
                                  Engine& engine) {
  std::vector<Point> targets;
  for (double x : x_grid) targets.push_back(shape_target(N, x));
  std::vector<double> out(x_grid.size(), 0.0);
  std::vector<double> row(N + 1, kNegInf);
  std::vector<double> weights(N + 1);
  for (int j = 0; j <= N; ++j) {
    const int len = N - j + 1;
    law.fill(engine, std::span<double>(weights.data(), len));
    for (int i = 0; i < len; ++i) {
      const double left = i > 0 ? row[i - 1] : kNegInf;
      const double best = (i == 0 && j == 0) ? 0.0 : std::max(left, row[i]);
      row[i] = weights[i] + best;
    }
    for (std::size_t k = 0; k < targets.size(); ++k)
      if (targets[k].y == j) out[k] = row[targets[k].x] / N;
  }
  return out;
}

namespace detail {

void validate_shape_options(const ShapeOptions& opts) {
  if (opts.N < 2) throw ConfigError("shape: N must be >= 2");
  if (opts.replicas < 1) throw ConfigError("shape: replicas must be >= 1");
  if (opts.x_grid.empty()) throw ConfigError("shape: empty x grid");
  for (double x : opts.x_grid)
    if (!(x > 0 && x < 1)) throw ConfigError("shape: x grid must lie in (0,1)");
}

ShapeEstimate reduce_shape(const ShapeOptions& opts,
                           const std::vector<std::vector<double>>& per_replica) {
  ShapeEstimate est;
  est.N = opts.N;
  est.x_grid = opts.x_grid;
  est.replicas = opts.replicas;
  const std::size_t k = opts.x_grid.size();
  const double r = opts.replicas;
  est.mean_over_N.assign(k, 0.0);
  est.std_error.assign(k, 0.0);
  for (std::size_t i = 0; i < k; ++i) {
    double s = 0.0;
    for (const auto& rep : per_replica) s += rep[i];
    const double m = s / r;
    double ss = 0.0;
    for (const auto& rep : per_replica) ss += (rep[i] - m) * (rep[i] - m);
    est.mean_over_N[i] = m;
    est.std_error[i] = opts.replicas > 1
                           ? std::sqrt(ss / (r - 1) / r)
                           : std::numeric_limits<double>::quiet_NaN();
  }
  return est;
}

}  // namespace detail

}  // namespace lpp
