#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lpp/distributions.hpp"
#include "lpp/lattice.hpp"
#include "lpp/stats.hpp"

namespace lpp {

/// t_n = ([n / (1 + s)], [n s / (1 + s)]).
Point horizon_target(double s, int n);

/// v_k on the staircase 0, e1, e1 - e2, 2e1 - e2, ...: odd steps are e1 and
/// even steps are -e2.
Point downright_vertex(int k);

/// Reverse passage times G(x, t) over x in [0, t.x] x [-depth, t.y]. The
/// extra `depth` rows below y = 0 hold the down/right staircase.
class BusemannField {
 public:
  /// `weights` is row-major over the rectangle, row y = -depth first.
  BusemannField(Point target, int depth, std::vector<double> weights);

  /// Weights are drawn row by row from the top (y = t.y) down, x ascending,
  /// from the stream derive_seed(seed, "busemann", 0). Extra depth rows
  /// therefore never change the weights of the rows above them.
  static BusemannField generate(const WeightLaw& law, double s, int n,
                                std::uint64_t seed, int depth = 0);

  Point target() const { return target_; }
  int depth() const { return depth_; }
  int horizon() const { return target_.x + target_.y; }
  bool contains(Point p) const {
    return p.x >= 0 && p.x <= target_.x && p.y >= -depth_ && p.y <= target_.y;
  }

  double weight(Point p) const { return w_[index(p)]; }
  /// G(p, t).
  double passage(Point p) const { return g_[index(p)]; }
  /// B_n(a, b) = G(a, t) - G(b, t).
  double busemann(Point a, Point b) const { return passage(a) - passage(b); }

  /// Step minimizing B_n(p, p + e_i); ties go to e1. Steps that leave the
  /// rectangle are never chosen.
  Point arrow(Point p) const;

  /// Sum of weights along `path`, accumulated from its last vertex backward
  /// so that a geodesic reproduces G exactly.
  double path_weight(const LatticePath& path) const;

 private:
  std::size_t index(Point p) const {
    return static_cast<std::size_t>(p.y + depth_) * (target_.x + 1) + p.x;
  }
  Point target_;
  int depth_;
  std::vector<double> w_;
  std::vector<double> g_;
};

BusemannField busemann_field(const WeightLaw& law, double s, int n,
                             std::uint64_t seed, int depth = 0);

/// Up/right path from `start` to the target following arrow().
LatticePath follow_arrows(const BusemannField& field, Point start);

struct BusemannOptions {
  double s = 1.0;
  int n = 1000;
  int replicas = 10000;
  std::uint64_t seed = 1;
  int threads = 0;      // 0: OpenMP default
  bool serial = false;  // use the serial reference kernel
};

/// Streaming reverse DP for one replica: O(width) memory, returns G(q, t)
/// for every query point. Weight order matches BusemannField::generate.
std::vector<double> busemann_replica(const WeightLaw& law, Point target,
                                     int depth, std::span<const Point> queries,
                                     Engine& engine);

/// Row r of the result holds busemann_replica() for replica r, which draws
/// from derive_seed(seed, "busemann", r).
std::vector<std::vector<double>> busemann_replicas(
    const WeightLaw& law, const BusemannOptions& opts, int depth,
    std::span<const Point> queries);
std::vector<std::vector<double>> busemann_replicas_serial(
    const WeightLaw& law, const BusemannOptions& opts, int depth,
    std::span<const Point> queries);

struct IncrementCovReport {
  std::string pair;
  int k = 0;
  double cov = 0.0;
  double std_error = 0.0;
  int replicas = 0;
  int n = 0;
  double s = 0.0;
  /// cov <= 3 stderr; empty below 100 replicas.
  std::optional<bool> nonpositive;
};

/// Cov(B_n(e2, 0), B_n(0, e1)) over independent fields.
IncrementCovReport adjacent_cov(const WeightLaw& law,
                                const BusemannOptions& opts);

struct DownRightCov {
  /// Cov(B_n(0, e1), B_n(v_k, v_{k+1})), k = 1..k_max.
  std::vector<IncrementCovReport> with_e1;
  /// Cov(B_n(e2, 0), B_n(v_k, v_{k+1})), k = 0..k_max; k = 0 is adjacent_cov.
  std::vector<IncrementCovReport> with_e2;
};

DownRightCov downright_cov(const WeightLaw& law, const BusemannOptions& opts,
                           int k_max);

struct MeanCheck {
  double estimate = 0.0;
  double std_error = 0.0;
  double reference = 0.0;
};

struct AdjacentSummary {
  IncrementCovReport cov;
  MeanCheck e1;
  MeanCheck e2;
};

/// adjacent_cov and increment_mean_check from one batch of replicas.
AdjacentSummary adjacent_summary(const WeightLaw& law,
                                 const BusemannOptions& opts);

/// Means of B_n(0, e1) and B_n(0, e2) next to the g_Exp gradient
/// (m + sigma sqrt(s), m + sigma / sqrt(s)).
std::pair<MeanCheck, MeanCheck> increment_mean_check(
    const WeightLaw& law, const BusemannOptions& opts);

struct VarianceBound {
  double lhs = 0.0;  // Var(B_n(0, v_N))
  double lhs_error = 0.0;
  double rhs = 0.0;  // N Var(B_n(0, v_1))
  double rhs_error = 0.0;
  double ratio = 0.0;  // lhs / rhs
  double ratio_error = 0.0;
  bool verdict = false;  // ratio <= 1 + 3 ratio_error
};

VarianceBound variance_bound_check(const WeightLaw& law,
                                   const BusemannOptions& opts,
                                   int path_length);

}  // namespace lpp
