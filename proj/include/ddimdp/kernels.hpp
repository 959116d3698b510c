#pragma once

// Data-parallel inner loops with a scalar reference implementation and an AVX2
// variant. The active variant is picked once at startup from CPUID and can be
// pinned with DDIMDP_ISA=scalar|avx2 or set_isa(). Both variants perform the
// same floating-point operations in the same order, so their outputs are
// bit-identical.

#include <cstddef>
#include <cstdint>
#include <span>

namespace ddimdp::kernels {

enum class Isa { scalar, avx2 };

const char* to_string(Isa isa);
bool isa_available(Isa isa);
Isa active_isa();
// Returns false (and leaves the selection untouched) if the CPU lacks isa.
bool set_isa(Isa isa);

// Uniform grid over the closed box [low, high] with dims[a] cells on axis a.
// Flat indices are row-major: the last axis varies fastest.
struct GridView {
  const double* low;
  const double* high;
  const double* width;
  const std::int32_t* dims;
  int n;
};

// out[k] = flat cell index of shift + (axes[0][k], ..., axes[n-1][k]), or -1
// when that point lies outside [low, high]. Points on the upper boundary go to
// the last cell.
void locate_cells(const GridView& grid, const double* shift, std::span<const double* const> axes,
                  std::size_t count, std::int32_t* out);

// out[k] = max_i (normals[i, :] . p_k - offsets[i]) for points p_k stored
// axis-major as above; normals is row-major m x n.
void max_violation(const double* normals, const double* offsets, int m, int n,
                   std::span<const double* const> axes, std::size_t count, double* out);

namespace scalar {
void locate_cells(const GridView& grid, const double* shift, std::span<const double* const> axes,
                  std::size_t begin, std::size_t end, std::int32_t* out);
void max_violation(const double* normals, const double* offsets, int m, int n,
                   std::span<const double* const> axes, std::size_t begin, std::size_t end, double* out);
}  // namespace scalar

#if defined(__x86_64__) || defined(_M_X64)
#define DDIMDP_HAVE_AVX2_KERNELS 1
namespace avx2 {
// Processes [0, count) in blocks of four; the scalar tail is handled here too.
void locate_cells(const GridView& grid, const double* shift, const double* const* axes,
                  std::size_t count, std::int32_t* out);
void max_violation(const double* normals, const double* offsets, int m, int n, const double* const* axes,
                   std::size_t count, double* out);
}  // namespace avx2
#endif

}  // namespace ddimdp::kernels
