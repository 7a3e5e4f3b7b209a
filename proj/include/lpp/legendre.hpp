#pragma once

#include <span>
#include <vector>

#include "lpp/lattice.hpp"

namespace lpp {

enum class SliceSource { analytic, monte_carlo };

/// Samples of gamma(s) = g(1, s) on an increasing grid of s > 0. `m` is the
/// mean weight, equal to g(1, 0). `std_error` is empty for analytic slices.
struct ShapeSlice {
  std::vector<double> s_grid;
  std::vector<double> gamma;
  std::vector<double> std_error;
  double m = 0.0;
  SliceSource source = SliceSource::analytic;
};

/// f(a) = sup_{s > 0} (gamma(s) - s a) on a grid of a values.
struct DualFunction {
  std::vector<double> a_grid;
  std::vector<double> f_values;
  double m = 0.0;
};

/// n points geometrically spaced over [lo, hi].
std::vector<double> log_grid(double lo, double hi, int n);

ShapeSlice exp_slice(ExpShapeParams params, std::span<const double> s_grid);

/// Monte Carlo slice from a diagonal shape profile: gamma(s) =
/// (1 + s) g(1 / (1 + s), s / (1 + s)), so x maps to s = (1 - x) / x.
ShapeSlice slice_from_profile(const ShapeEstimate& est, double m);

/// Pointwise least concave majorant of (s_i, gamma_i), evaluated back on
/// the same grid.
std::vector<double> least_concave_majorant(std::span<const double> s,
                                           std::span<const double> y);

/// Discrete supremum with three-point parabolic refinement at the argmax.
/// a <= m gives +inf. Monte Carlo slices are replaced by their least
/// concave majorant first.
DualFunction dual_from_slice(const ShapeSlice& slice,
                             std::span<const double> a_grid);

/// gamma(s) = inf_{a > m} (s a + f(a)), discrete infimum with parabolic
/// refinement.
ShapeSlice slice_from_dual(const DualFunction& dual,
                           std::span<const double> s_grid);

/// -sigma^2 + (f(a) - m)(a - m).
double cov_from_dual(double m, double sigma, double f_a, double a);

enum class Relation { below, equal, above };

struct NegCovVerdict {
  std::vector<Relation> points;
  bool holds = false;           // f(a) <= m + sigma^2 / (a - m) everywhere
  bool reversed_holds = false;  // f(a) >= m + sigma^2 / (a - m) everywhere
  bool boundary = false;        // both, within tolerance
  double max_excess = 0.0;      // max of f(a) - m - sigma^2 / (a - m)
};

/// Points within `tol` of the exponential dual count as equal.
NegCovVerdict neg_cov_condition(const DualFunction& dual, double m,
                                double sigma, double tol = 1e-4);

struct ShapeComparison {
  bool dominates = false;     // slice1 <= slice2 (+ slack) on the grid
  bool dominated_by = false;  // slice2 <= slice1 (+ slack) on the grid
  double max_violation = 0.0;
  double argmax_s = 0.0;
};

/// Compares two slices on a common grid inside (0, 1]. Slack at each point
/// is 3 times the combined standard error of the two slices. Dominance on
/// (0, 1] extends to the whole quadrant by homogeneity and symmetry.
ShapeComparison compare_shapes(const ShapeSlice& slice1,
                               const ShapeSlice& slice2);

/// g(x, y) from a slice on (0, 1]: x gamma(y / x) when y <= x, otherwise
/// with the coordinates swapped. gamma is interpolated linearly, with
/// gamma(0) = m.
double evaluate_shape(const ShapeSlice& slice, double x, double y);

}  // namespace lpp
