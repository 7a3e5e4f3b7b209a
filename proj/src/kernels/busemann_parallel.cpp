#include <omp.h>

#include <exception>

#include "lpp/busemann.hpp"

namespace lpp {

std::vector<std::vector<double>> busemann_replicas(
    const WeightLaw& law, const BusemannOptions& opts, int depth,
    std::span<const Point> queries) {
  const Point t = horizon_target(opts.s, opts.n);
  std::vector<std::vector<double>> out(opts.replicas);
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 4) num_threads(threads)
  for (int r = 0; r < opts.replicas; ++r) {
    try {
      Engine engine = make_stream(opts.seed, "busemann", r);
      out[r] = busemann_replica(law, t, depth, queries, engine);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace lpp
