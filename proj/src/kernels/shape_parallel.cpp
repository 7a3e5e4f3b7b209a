#include <omp.h>

#include "../shape_common.hpp"

namespace lpp {

ShapeEstimate shape_profile(const WeightLaw& law, const ShapeOptions& opts) {
  detail::validate_shape_options(opts);
  std::vector<std::vector<double>> per_replica(opts.replicas);
  const int threads = opts.threads > 0 ? opts.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int r = 0; r < opts.replicas; ++r) {
    Engine engine = make_stream(opts.seed, "shape", r);
    per_replica[r] = shape_replica(law, opts.N, opts.x_grid, engine);
  }
  // Replica-ordered reduction: independent of the schedule.
  return detail::reduce_shape(opts, per_replica);
}

}  // namespace lpp
