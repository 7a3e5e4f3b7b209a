#pragma once

#include <vector>

#include "lpp/lattice.hpp"

namespace lpp::detail {

void validate_shape_options(const ShapeOptions& opts);

ShapeEstimate reduce_shape(const ShapeOptions& opts,
                           const std::vector<std::vector<double>>& per_replica);

}  // namespace lpp::detail
