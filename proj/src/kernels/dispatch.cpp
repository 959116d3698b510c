#include <atomic>
#include <cstdlib>
#include <cstring>
#include <vector>

#include "ddimdp/kernels.hpp"

namespace ddimdp::kernels {
namespace {

Isa detect() {
  Isa best = Isa::scalar;
#if defined(DDIMDP_HAVE_AVX2_KERNELS)
  if (__builtin_cpu_supports("avx2")) best = Isa::avx2;
#endif
  if (const char* env = std::getenv("DDIMDP_ISA")) {
    if (std::strcmp(env, "scalar") == 0) best = Isa::scalar;
  }
  return best;
}

std::atomic<Isa>& selected() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_available(Isa isa) {
  if (isa == Isa::scalar) return true;
#if defined(DDIMDP_HAVE_AVX2_KERNELS)
  return __builtin_cpu_supports("avx2");
#else
  return false;
#endif
}

Isa active_isa() { return selected().load(std::memory_order_relaxed); }

bool set_isa(Isa isa) {
  if (!isa_available(isa)) return false;
  selected().store(isa, std::memory_order_relaxed);
  return true;
}

void locate_cells(const GridView& grid, const double* shift, std::span<const double* const> axes,
                  std::size_t count, std::int32_t* out) {
#if defined(DDIMDP_HAVE_AVX2_KERNELS)
  if (active_isa() == Isa::avx2) {
    avx2::locate_cells(grid, shift, axes.data(), count, out);
    return;
  }
#endif
  scalar::locate_cells(grid, shift, axes, 0, count, out);
}

void max_violation(const double* normals, const double* offsets, int m, int n,
                   std::span<const double* const> axes, std::size_t count, double* out) {
#if defined(DDIMDP_HAVE_AVX2_KERNELS)
  if (active_isa() == Isa::avx2) {
    avx2::max_violation(normals, offsets, m, n, axes.data(), count, out);
    return;
  }
#endif
  scalar::max_violation(normals, offsets, m, n, axes, 0, count, out);
}

}  // namespace ddimdp::kernels
