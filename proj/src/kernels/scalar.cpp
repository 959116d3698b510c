#include <algorithm>
#include <cmath>
#include <limits>

#include "ddimdp/kernels.hpp"

namespace ddimdp::kernels::scalar {

void locate_cells(const GridView& grid, const double* shift, std::span<const double* const> axes,
                  std::size_t begin, std::size_t end, std::int32_t* out) {
  for (std::size_t k = begin; k < end; ++k) {
    double flat = 0.0;
    bool inside = true;
    for (int a = 0; a < grid.n; ++a) {
      const double x = shift[a] + axes[static_cast<std::size_t>(a)][k];
      if (!(x >= grid.low[a] && x <= grid.high[a])) {
        inside = false;
        break;
      }
      double t = std::floor((x - grid.low[a]) / grid.width[a]);
      const double last = static_cast<double>(grid.dims[a] - 1);
      if (t > last) t = last;
      flat = flat * static_cast<double>(grid.dims[a]) + t;
    }
    out[k] = inside ? static_cast<std::int32_t>(flat) : -1;
  }
}

void max_violation(const double* normals, const double* offsets, int m, int n,
                   std::span<const double* const> axes, std::size_t begin, std::size_t end, double* out) {
  for (std::size_t k = begin; k < end; ++k) {
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s = s + normals[i * n + a] * axes[static_cast<std::size_t>(a)][k];
      worst = std::max(worst, s - offsets[i]);
    }
    out[k] = worst;
  }
}

}  // namespace ddimdp::kernels::scalar
