// Compiled with -mavx2. Keep this translation unit free of inline library
// templates so no AVX2 instantiation can be merged into scalar callers.

#include <immintrin.h>

#include "ddimdp/kernels.hpp"

namespace ddimdp::kernels::avx2 {
namespace {

inline double floor_scalar(double v) {
  __m128d x = _mm_set_sd(v);
  return _mm_cvtsd_f64(_mm_floor_sd(x, x));
}

}  // namespace

void locate_cells(const GridView& grid, const double* shift, const double* const* axes, std::size_t count,
                  std::int32_t* out) {
  const int n = grid.n;
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    __m256d flat = _mm256_setzero_pd();
    __m256d inside = _mm256_castsi256_pd(_mm256_set1_epi64x(-1));
    for (int a = 0; a < n; ++a) {
      const __m256d x = _mm256_add_pd(_mm256_set1_pd(shift[a]), _mm256_loadu_pd(axes[a] + k));
      const __m256d lo = _mm256_set1_pd(grid.low[a]);
      const __m256d hi = _mm256_set1_pd(grid.high[a]);
      inside = _mm256_and_pd(inside, _mm256_and_pd(_mm256_cmp_pd(x, lo, _CMP_GE_OQ), _mm256_cmp_pd(x, hi, _CMP_LE_OQ)));
      __m256d t = _mm256_floor_pd(_mm256_div_pd(_mm256_sub_pd(x, lo), _mm256_set1_pd(grid.width[a])));
      const __m256d last = _mm256_set1_pd(static_cast<double>(grid.dims[a] - 1));
      t = _mm256_blendv_pd(t, last, _mm256_cmp_pd(t, last, _CMP_GT_OQ));
      flat = _mm256_add_pd(_mm256_mul_pd(flat, _mm256_set1_pd(static_cast<double>(grid.dims[a]))), t);
    }
    // Outside lanes may hold garbage; zero them, then force them to -1.
    flat = _mm256_and_pd(flat, inside);
    const __m128i idx = _mm256_cvttpd_epi32(flat);
    const __m256i lanes = _mm256_permutevar8x32_epi32(_mm256_castpd_si256(inside), _mm256_setr_epi32(0, 2, 4, 6, 1, 3, 5, 7));
    const __m128i keep = _mm256_castsi256_si128(lanes);
    const __m128i result = _mm_or_si128(_mm_and_si128(idx, keep), _mm_xor_si128(keep, _mm_set1_epi32(-1)));
    _mm_storeu_si128(reinterpret_cast<__m128i*>(out + k), result);
  }
  for (; k < count; ++k) {
    double flat = 0.0;
    bool inside = true;
    for (int a = 0; a < n; ++a) {
      const double x = shift[a] + axes[a][k];
      if (!(x >= grid.low[a] && x <= grid.high[a])) {
        inside = false;
        break;
      }
      double t = floor_scalar((x - grid.low[a]) / grid.width[a]);
      const double last = static_cast<double>(grid.dims[a] - 1);
      if (t > last) t = last;
      flat = flat * static_cast<double>(grid.dims[a]) + t;
    }
    out[k] = inside ? static_cast<std::int32_t>(flat) : -1;
  }
}

void max_violation(const double* normals, const double* offsets, int m, int n, const double* const* axes,
                   std::size_t count, double* out) {
  std::size_t k = 0;
  for (; k + 4 <= count; k += 4) {
    __m256d worst = _mm256_set1_pd(-__builtin_inf());
    for (int i = 0; i < m; ++i) {
      __m256d s = _mm256_setzero_pd();
      for (int a = 0; a < n; ++a) {
        s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_set1_pd(normals[i * n + a]), _mm256_loadu_pd(axes[a] + k)));
      }
      worst = _mm256_max_pd(_mm256_sub_pd(s, _mm256_set1_pd(offsets[i])), worst);
    }
    _mm256_storeu_pd(out + k, worst);
  }
  for (; k < count; ++k) {
    double worst = -__builtin_inf();
    for (int i = 0; i < m; ++i) {
      double s = 0.0;
      for (int a = 0; a < n; ++a) s = s + normals[i * n + a] * axes[a][k];
      const double v = s - offsets[i];
      worst = v > worst ? v : worst;
    }
    out[k] = worst;
  }
}

}  // namespace ddimdp::kernels::avx2
