#include "lpp/busemann.hpp"

namespace lpp {

std::vector<std::vector<double>> busemann_replicas_serial(
    const WeightLaw& law, const BusemannOptions& opts, int depth,
    std::span<const Point> queries) {
  const Point t = horizon_target(opts.s, opts.n);
  std::vector<std::vector<double>> out(opts.replicas);
  for (int r = 0; r < opts.replicas; ++r) {
    Engine engine = make_stream(opts.seed, "busemann", r);
    out[r] = busemann_replica(law, t, depth, queries, engine);
  }
  return out;
}

}  // namespace lpp
