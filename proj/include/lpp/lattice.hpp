#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lpp/distributions.hpp"

namespace lpp {

struct Point {
  int x = 0;
  int y = 0;
  friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend bool operator==(Point, Point) = default;
};

inline constexpr Point kE1{1, 0};
inline constexpr Point kE2{0, 1};

/// A start point plus unit steps. Up/right paths use only e1 and e2.
struct LatticePath {
  Point start;
  std::vector<Point> steps;

  std::vector<Point> vertices() const;
  Point end() const;
  bool is_up_right() const;
};

/// Dense row-major weights on {0..width-1} x {0..height-1}; weight of (x, y)
/// sits at index y * width + x.
class WeightGrid {
 public:
  WeightGrid(int width, int height, std::vector<double> weights);

  /// Samples every site in row-major order from the stream
  /// derive_seed(seed, "grid", 0).
  static WeightGrid generate(const WeightLaw& law, int width, int height,
                             std::uint64_t seed);

  int width() const { return width_; }
  int height() const { return height_; }
  double at(int x, int y) const { return w_[index(x, y)]; }
  double at(Point p) const { return at(p.x, p.y); }
  double& at(int x, int y) { return w_[index(x, y)]; }
  std::span<const double> values() const { return w_; }
  bool contains(Point p) const {
    return p.x >= 0 && p.y >= 0 && p.x < width_ && p.y < height_;
  }

 private:
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }
  int width_;
  int height_;
  std::vector<double> w_;
};

/// Table of last-passage times G(0, (x, y)) over a WeightGrid.
class PassageField {
 public:
  PassageField(int width, int height, std::vector<double> values)
      : width_(width), height_(height), g_(std::move(values)) {}

  int width() const { return width_; }
  int height() const { return height_; }
  double at(int x, int y) const {
    return g_[static_cast<std::size_t>(y) * width_ + x];
  }
  double at(Point p) const { return at(p.x, p.y); }
  std::span<const double> values() const { return g_; }

  /// Cells with x + y = d, ordered by increasing x.
  std::vector<double> antidiagonal(int d) const;

 private:
  int width_;
  int height_;
  std::vector<double> g_;
};

/// Row-by-row dynamic program G = w + max(left, below); the serial reference.
PassageField passage_field(const WeightGrid& grid);

/// Antidiagonal wavefront over the same recursion, parallel within each
/// diagonal. Bit-identical to passage_field.
PassageField passage_field_wavefront(const WeightGrid& grid, int threads = 0);

/// Streaming variant: keeps one row of passage times (O(width) memory) and
/// returns the antidiagonal x + y = d, ordered by increasing x.
std::vector<double> antidiagonal_streaming(const WeightGrid& grid, int d);

/// G(from, to) over up/right paths inside the grid (both endpoints counted).
/// Returns -inf when `to` is not reachable from `from`.
double passage_time(const WeightGrid& grid, Point from, Point to);

struct ExpShapeParams {
  double m;
  double sigma;
};

ExpShapeParams exp_shape_params(const WeightLaw& law);

/// m (x + y) + 2 sigma sqrt(x y).
double g_exp(ExpShapeParams params, double x, double y);

struct ShapeOptions {
  int N = 2000;
  std::vector<double> x_grid;
  int replicas = 20;
  std::uint64_t seed = 1;
  int threads = 0;  // 0: OpenMP default
};

struct ShapeEstimate {
  int N = 0;
  std::vector<double> x_grid;
  std::vector<double> mean_over_N;
  std::vector<double> std_error;
  int replicas = 0;
};

/// Uniform interior grid x_i = i / (count + 1), i = 1..count.
std::vector<double> interior_grid(int count);

/// Lattice point read for grid value x: ([N x], [N (1 - x)]).
Point shape_target(int N, double x);

/// G(0, shape_target(N, x)) / N for every x, from one triangle DP over
/// {i + j <= N}. Weights are drawn row by row (j ascending, i ascending)
/// from `engine`.
std::vector<double> shape_replica(const WeightLaw& law, int N,
                                  std::span<const double> x_grid,
                                  Engine& engine);

/// Replica-parallel Monte Carlo estimate; replica r draws from
/// derive_seed(seed, "shape", r) and the reduction runs in replica order.
ShapeEstimate shape_profile(const WeightLaw& law, const ShapeOptions& opts);

/// Serial reference for shape_profile; identical output.
ShapeEstimate shape_profile_serial(const WeightLaw& law,
                                   const ShapeOptions& opts);

}  // namespace lpp
