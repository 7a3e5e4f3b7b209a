#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lpp/distributions.hpp"
#include "lpp/lattice.hpp"

namespace lpp {

using Rational = boost::rational<std::int64_t>;

/// Parses "3", "1/2" or a terminating decimal such as "0.25".
Rational parse_rational(std::string_view text);
std::string format_rational(Rational q);

/// Coarse grid for paths from (0, 0) to (N, N s). Lines are
/// y = r (k M - x); coarse points sit every L(1 + r) in l1 along each line.
/// Requires r <= 1, L | M, 2L <= M, and integral M r, L r and N s.
struct CoarseGridSpec {
  int N = 0;
  Rational s{1};
  Rational r{1};
  int M = 1;
  int L = 1;
  double b_N = 1.0;
};

void validate(const CoarseGridSpec& spec);

/// Lattice geometry of a validated spec. Membership tests use the integer
/// level b y + a x for r = a / b, which is a k M on the line of index k.
class CoarseGrid {
 public:
  explicit CoarseGrid(const CoarseGridSpec& spec);

  const CoarseGridSpec& spec() const { return spec_; }
  Point end() const { return {spec_.N, ns_}; }

  std::int64_t level(Point p) const { return b_ * p.y + a_ * p.x; }
  std::int64_t line_level(int k) const { return a_ * k * spec_.M; }
  /// Index of the line through p, if any.
  std::optional<int> line_of(Point p) const;
  bool is_coarse(Point p) const;
  /// k >= 1 when line k <= level(p) <= line k + a L, else 0.
  int zone_of(Point p) const;

  /// Coarse points on line k with x, y >= 0, by decreasing x.
  std::vector<Point> coarse_points(int k) const;
  /// Lattice points of zone k inside [0, N + L] x [0, N s + L r].
  std::vector<Point> zone_points(int k) const;

 private:
  CoarseGridSpec spec_;
  std::int64_t a_;
  std::int64_t b_;
  int ns_;
  int lr_;
};

/// Empty when `path` is in PATH'_N, otherwise the first violated rule.
std::string admissibility_violation(const LatticePath& path,
                                    const CoarseGridSpec& spec);
bool is_admissible(const LatticePath& path, const CoarseGridSpec& spec);

/// Reroutes every non-coarse crossing of an up/right path through the
/// nearest coarse point on the far side and rejoins the path inside the
/// free zone.
LatticePath modify_path(const LatticePath& gamma, const CoarseGridSpec& spec);

/// Exact |PATH'_N| by memoised depth-first search. Throws ResourceError when
/// the search visits more than `node_limit` states or the count overflows.
std::uint64_t enumerate_paths(const CoarseGridSpec& spec,
                              std::uint64_t node_limit = 200'000'000);

struct CountBound {
  double segment_log = 0.0;   // log(T_M 4^{2L})
  double exponent = 0.0;      // N (s + r) / (M r)
  double log_bound = 0.0;     // exponent * segment_log
  double asymptotic = 0.0;    // N (s + r) / (1 + r) log 4
};

/// The binomial argument 2 M r / (1 + r) is rounded up when fractional.
CountBound count_bound_log(const CoarseGridSpec& spec);

/// floor(N / M) + floor(N s / (r M)).
int crossings(int N, Rational s, Rational r, int M);

/// Number of lines k >= 1 an up/right path from (0, 0) to (N, N s) meets,
/// counted by walking `path`.
int crossings_along(const LatticePath& path, Rational r, int M);

/// Closed form of crossings_along: floor(N / M + N s / (r M)).
int crossings_geometric(int N, Rational s, Rational r, int M);

/// c N^2 s exp(-lambda b_N).
double good_tail_bound(int N, double s, double b_N, double c, double lambda);

/// Fraction of replicas with some |w| > b_N on [0, N] x [0, N s]; replica r
/// draws from derive_seed(seed, "good", r).
double good_complement_frequency(const WeightLaw& law, int N, double s,
                                 double b_N, int replicas, std::uint64_t seed);

/// alpha, beta, gamma > 0 with alpha + gamma < beta < 1.
bool schedule_valid(double alpha, double beta, double gamma);

/// Uniformly random up/right path from (0, 0) to (width, height).
LatticePath random_up_right_path(int width, int height, Engine& engine);

struct ModifyTrials {
  int trials = 0;
  int admissible = 0;
  int length_ok = 0;   // |G'| <= N (1 + s) + 2 L N (r + s) / (M r)
  int weight_ok = 0;   // W(G') >= W(G) - 4 L b_N N (r + s) / (M r)
  int modified = 0;    // trials where G' != G
  bool passed() const {
    return admissible == trials && length_ok == trials && weight_ok == trials;
  }
};

/// Random up/right paths, weights from `law` clamped to [-b_N, b_N] on
/// [0, N + L] x [0, N s + L r]. Trial t draws from
/// derive_seed(seed, "modify", t).
ModifyTrials verify_modify(const CoarseGridSpec& spec, const WeightLaw& law,
                           int trials, std::uint64_t seed);

}  // namespace lpp
