#include <omp.h>

#include <algorithm>
#include <limits>

#include "lpp/lattice.hpp"

namespace lpp {

PassageField passage_field_wavefront(const WeightGrid& grid, int threads) {
  const int w = grid.width(), h = grid.height();
  constexpr double kNegInf = -std::numeric_limits<double>::infinity();
  std::vector<double> g(static_cast<std::size_t>(w) * h);
  const int nt = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel num_threads(nt)
  for (int d = 0; d <= w + h - 2; ++d) {
    const int x0 = std::max(0, d - (h - 1));
    const int x1 = std::min(d, w - 1);
#pragma omp for schedule(static)
    for (int x = x0; x <= x1; ++x) {
      const int y = d - x;
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      const double left = x > 0 ? g[i - 1] : kNegInf;
      const double below = y > 0 ? g[i - w] : kNegInf;
      const double best = d == 0 ? 0.0 : std::max(left, below);
      g[i] = grid.at(x, y) + best;
    }
    // implicit barrier of omp for separates the diagonals
  }
  return PassageField(w, h, std::move(g));
}

}  // namespace lpp
