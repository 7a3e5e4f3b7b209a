#include "lpp/legendre.hpp"

#include <algorithm>
#include <cmath>

#include "lpp/distributions.hpp"
#include "lpp/errors.hpp"

namespace lpp {

namespace {

// Vertex value of the parabola through three points, or y1 when the
// parabola does not open toward the extremum (sign = +1 for a max).
double parabolic_peak(double x0, double y0, double x1, double y1, double x2,
                      double y2, double sign) {
  const double d0 = x0 - x1, d2 = x2 - x1;
  const double e0 = sign * (y0 - y1), e2 = sign * (y2 - y1);
  const double c = (e2 * d0 - e0 * d2) / (d0 * d2 * (d2 - d0));
  if (!(c < 0)) return y1;
  const double b = (e0 - c * d0 * d0) / d0;
  const double t = -b / (2 * c);
  if (t < d0 || t > d2) return y1;
  return y1 + sign * (-b * b / (4 * c));
}

template <class F>
double refined_extremum(std::span<const double> xs, F value, double sign) {
  std::size_t best = 0;
  double best_v = value(0);
  for (std::size_t i = 1; i < xs.size(); ++i) {
    const double v = value(i);
    if (sign * v > sign * best_v) {
      best = i;
      best_v = v;
    }
  }
  if (best == 0 || best + 1 == xs.size() || !std::isfinite(best_v))
    return best_v;
  return parabolic_peak(xs[best - 1], value(best - 1), xs[best], best_v,
                        xs[best + 1], value(best + 1), sign);
}

void check_increasing(std::span<const double> xs, const char* what) {
  if (xs.empty()) throw ConfigError(std::string(what) + ": empty grid");
  for (std::size_t i = 1; i < xs.size(); ++i)
    if (!(xs[i] > xs[i - 1]))
      throw ConfigError(std::string(what) + ": grid must be increasing");
}

double interpolate(std::span<const double> xs, std::span<const double> ys,
                   double x, double x_left, double y_left) {
  if (x <= xs.front()) {
    const double w = (x - x_left) / (xs.front() - x_left);
    return y_left + w * (ys.front() - y_left);
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), x);
  std::size_t i = it == xs.end() ? xs.size() - 1 : it - xs.begin();
  if (i == 0) i = 1;
  const double w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
  return ys[i - 1] + w * (ys[i] - ys[i - 1]);
}

}  // namespace

std::vector<double> log_grid(double lo, double hi, int n) {
  if (!(lo > 0 && hi > lo) || n < 2)
    throw ConfigError("log_grid: need 0 < lo < hi and n >= 2");
  std::vector<double> g(n);
  const double step = std::log(hi / lo) / (n - 1);
  for (int i = 0; i < n; ++i) g[i] = lo * std::exp(step * i);
  g.back() = hi;
  return g;
}

ShapeSlice exp_slice(ExpShapeParams params, std::span<const double> s_grid) {
  check_increasing(s_grid, "exp_slice");
  ShapeSlice slice;
  slice.s_grid.assign(s_grid.begin(), s_grid.end());
  slice.m = params.m;
  for (double s : s_grid) slice.gamma.push_back(g_exp(params, 1.0, s));
  return slice;
}

ShapeSlice slice_from_profile(const ShapeEstimate& est, double m) {
  ShapeSlice slice;
  slice.m = m;
  slice.source = SliceSource::monte_carlo;
  for (std::size_t i = est.x_grid.size(); i-- > 0;) {
    const double x = est.x_grid[i];
    const double scale = 1.0 / x;
    slice.s_grid.push_back((1 - x) / x);
    slice.gamma.push_back(scale * est.mean_over_N[i]);
    slice.std_error.push_back(scale * est.std_error[i]);
  }
  check_increasing(slice.s_grid, "slice_from_profile");
  return slice;
}

std::vector<double> least_concave_majorant(std::span<const double> s,
                                           std::span<const double> y) {
  std::vector<std::size_t> hull;
  for (std::size_t i = 0; i < s.size(); ++i) {
    while (hull.size() >= 2) {
      const std::size_t a = hull[hull.size() - 2], b = hull.back();
      // Drop b when it lies on or below the chord from a to i.
      const double cross =
          (s[b] - s[a]) * (y[i] - y[a]) - (y[b] - y[a]) * (s[i] - s[a]);
      if (cross >= 0)
        hull.pop_back();
      else
        break;
    }
    hull.push_back(i);
  }
  std::vector<double> out(s.size());
  std::size_t h = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    while (h + 1 < hull.size() && hull[h + 1] < i) ++h;
    if (hull[h] == i || h + 1 == hull.size()) {
      out[i] = y[hull[h]];
      continue;
    }
    const std::size_t a = hull[h], b = hull[h + 1];
    if (b == i) {
      out[i] = y[b];
      continue;
    }
    const double w = (s[i] - s[a]) / (s[b] - s[a]);
    out[i] = y[a] + w * (y[b] - y[a]);
  }
  return out;
}

DualFunction dual_from_slice(const ShapeSlice& slice,
                             std::span<const double> a_grid) {
  check_increasing(slice.s_grid, "dual_from_slice");
  if (slice.gamma.size() != slice.s_grid.size())
    throw ConfigError("dual_from_slice: gamma and s_grid differ in length");
  const std::vector<double> gamma =
      slice.source == SliceSource::monte_carlo
          ? least_concave_majorant(slice.s_grid, slice.gamma)
          : slice.gamma;
  DualFunction dual;
  dual.m = slice.m;
  dual.a_grid.assign(a_grid.begin(), a_grid.end());
  for (double a : a_grid) {
    if (!(a > slice.m)) {
      dual.f_values.push_back(kInf);
      continue;
    }
    dual.f_values.push_back(refined_extremum(
        slice.s_grid,
        [&](std::size_t i) { return gamma[i] - slice.s_grid[i] * a; }, +1.0));
  }
  return dual;
}

ShapeSlice slice_from_dual(const DualFunction& dual,
                           std::span<const double> s_grid) {
  check_increasing(dual.a_grid, "slice_from_dual");
  ShapeSlice slice;
  slice.m = dual.m;
  slice.s_grid.assign(s_grid.begin(), s_grid.end());
  for (double s : s_grid) {
    slice.gamma.push_back(refined_extremum(
        dual.a_grid,
        [&](std::size_t i) { return s * dual.a_grid[i] + dual.f_values[i]; },
        -1.0));
  }
  return slice;
}

double cov_from_dual(double m, double sigma, double f_a, double a) {
  return -sigma * sigma + (f_a - m) * (a - m);
}

NegCovVerdict neg_cov_condition(const DualFunction& dual, double m,
                                double sigma, double tol) {
  NegCovVerdict v;
  v.holds = v.reversed_holds = true;
  v.max_excess = -kInf;
  for (std::size_t i = 0; i < dual.a_grid.size(); ++i) {
    const double a = dual.a_grid[i];
    if (!(a > m)) throw ConfigError("neg_cov_condition: a grid must exceed m");
    const double excess = dual.f_values[i] - (m + sigma * sigma / (a - m));
    v.max_excess = std::max(v.max_excess, excess);
    Relation r = Relation::equal;
    if (excess > tol) r = Relation::above;
    if (excess < -tol) r = Relation::below;
    v.points.push_back(r);
    if (r == Relation::above) v.holds = false;
    if (r == Relation::below) v.reversed_holds = false;
  }
  v.boundary = v.holds && v.reversed_holds;
  return v;
}

ShapeComparison compare_shapes(const ShapeSlice& slice1,
                               const ShapeSlice& slice2) {
  if (slice1.s_grid != slice2.s_grid)
    throw ConfigError("compare_shapes: slices use different s grids");
  check_increasing(slice1.s_grid, "compare_shapes");
  if (!(slice1.s_grid.front() > 0 && slice1.s_grid.back() <= 1))
    throw ConfigError("compare_shapes: s grid must lie in (0, 1]");
  auto err = [](const ShapeSlice& sl, std::size_t i) {
    return sl.std_error.empty() ? 0.0 : sl.std_error[i];
  };
  ShapeComparison c;
  c.dominates = c.dominated_by = true;
  c.max_violation = -kInf;
  for (std::size_t i = 0; i < slice1.s_grid.size(); ++i) {
    const double e1 = err(slice1, i), e2 = err(slice2, i);
    const double slack = 3 * std::sqrt(e1 * e1 + e2 * e2);
    const double diff = slice1.gamma[i] - slice2.gamma[i];
    if (diff - slack > c.max_violation) {
      c.max_violation = diff - slack;
      c.argmax_s = slice1.s_grid[i];
    }
    if (diff > slack) c.dominates = false;
    if (-diff > slack) c.dominated_by = false;
  }
  return c;
}

double evaluate_shape(const ShapeSlice& slice, double x, double y) {
  if (x < 0 || y < 0) throw ConfigError("evaluate_shape: negative argument");
  if (y > x) std::swap(x, y);
  if (x == 0) return 0.0;
  return x * interpolate(slice.s_grid, slice.gamma, y / x, 0.0, slice.m);
}

}  // namespace lpp
