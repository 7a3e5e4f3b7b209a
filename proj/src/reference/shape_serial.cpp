#include "../shape_common.hpp"

namespace lpp {

ShapeEstimate shape_profile_serial(const WeightLaw& law,
                                   const ShapeOptions& opts) {
  detail::validate_shape_options(opts);
  std::vector<std::vector<double>> per_replica(opts.replicas);
  for (int r = 0; r < opts.replicas; ++r) {
    Engine engine = make_stream(opts.seed, "shape", r);
    per_replica[r] = shape_replica(law, opts.N, opts.x_grid, engine);
  }
  return detail::reduce_shape(opts, per_replica);
}

}  // namespace lpp
