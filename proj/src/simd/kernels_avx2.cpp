// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma;
// nothing here may run unless dispatch confirmed CPU support.
#include "nlab/simd/kernels.hpp"

#if defined(NLAB_HAVE_AVX2)

#include <immintrin.h>

namespace nlab::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 8 <= n; i += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
  }
  for (; i + 4 <= n; i += 4)
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
  double s = hsum(_mm256_add_pd(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_avx2(const double* a, std::size_t n) { return dot_avx2(a, a, n); }

void matvec_avx2(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot_avx2(w + i * cols, x, cols);
}

void matvec_transposed_avx2(const double* w, std::size_t rows, std::size_t cols,
                            const double* x, double* y) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = w + i * cols;
    const __m256d xi = _mm256_set1_pd(x[i]);
    std::size_t j = 0;
    for (; j + 4 <= cols; j += 4) {
      __m256d yj = _mm256_loadu_pd(y + j);
      yj = _mm256_fmadd_pd(_mm256_loadu_pd(row + j), xi, yj);
      _mm256_storeu_pd(y + j, yj);
    }
    for (; j < cols; ++j) y[j] += row[j] * x[i];
  }
}

double lorentz_row_avx2(const double* w, double s, const double* v, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  const __m256d one = _mm256_set1_pd(1.0);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d d = _mm256_sub_pd(vs, _mm256_loadu_pd(v + j));
    const __m256d den = _mm256_fmadd_pd(d, d, one);
    acc = _mm256_add_pd(acc, _mm256_div_pd(_mm256_loadu_pd(w + j), den));
  }
  double r = hsum(acc);
  for (; j < n; ++j) {
    const double d = s - v[j];
    r += w[j] / (1.0 + d * d);
  }
  return r;
}

double sqdiff_row_avx2(const double* w, double s, const double* v, std::size_t n) {
  const __m256d vs = _mm256_set1_pd(s);
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d d = _mm256_sub_pd(vs, _mm256_loadu_pd(v + j));
    acc = _mm256_fmadd_pd(_mm256_mul_pd(_mm256_loadu_pd(w + j), d), d, acc);
  }
  double r = hsum(acc);
  for (; j < n; ++j) {
    const double d = s - v[j];
    r += w[j] * d * d;
  }
  return r;
}

}  // namespace

const KernelTable* avx2_table() noexcept {
  static const KernelTable t{Backend::avx2,       dot_avx2,
                             sum_squares_avx2,    matvec_avx2,
                             matvec_transposed_avx2, lorentz_row_avx2,
                             sqdiff_row_avx2};
  return &t;
}

}  // namespace nlab::simd::detail

#else

namespace nlab::simd::detail {
const KernelTable* avx2_table() noexcept { return nullptr; }
}  // namespace nlab::simd::detail

#endif
