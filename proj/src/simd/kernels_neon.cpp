// NEON (AArch64) variants; float64x2 lanes.
#include "nlab/simd/kernels.hpp"

#if defined(__aarch64__) && defined(__ARM_NEON)

#include <arm_neon.h>

namespace nlab::simd::detail {
namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc0 = vdupq_n_f64(0.0);
  float64x2_t acc1 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc0 = vfmaq_f64(acc0, vld1q_f64(a + i), vld1q_f64(b + i));
    acc1 = vfmaq_f64(acc1, vld1q_f64(a + i + 2), vld1q_f64(b + i + 2));
  }
  double s = vaddvq_f64(vaddq_f64(acc0, acc1));
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_neon(const double* a, std::size_t n) { return dot_neon(a, a, n); }

void matvec_neon(const double* w, std::size_t rows, std::size_t cols, const double* x,
                 double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot_neon(w + i * cols, x, cols);
}

void matvec_transposed_neon(const double* w, std::size_t rows, std::size_t cols,
                            const double* x, double* y) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double* row = w + i * cols;
    const float64x2_t xi = vdupq_n_f64(x[i]);
    std::size_t j = 0;
    for (; j + 2 <= cols; j += 2)
      vst1q_f64(y + j, vfmaq_f64(vld1q_f64(y + j), vld1q_f64(row + j), xi));
    for (; j < cols; ++j) y[j] += row[j] * x[i];
  }
}

double lorentz_row_neon(const double* w, double s, const double* v, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  const float64x2_t one = vdupq_n_f64(1.0);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t d = vsubq_f64(vs, vld1q_f64(v + j));
    acc = vaddq_f64(acc, vdivq_f64(vld1q_f64(w + j), vfmaq_f64(one, d, d)));
  }
  double r = vaddvq_f64(acc);
  for (; j < n; ++j) {
    const double d = s - v[j];
    r += w[j] / (1.0 + d * d);
  }
  return r;
}

double sqdiff_row_neon(const double* w, double s, const double* v, std::size_t n) {
  const float64x2_t vs = vdupq_n_f64(s);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t d = vsubq_f64(vs, vld1q_f64(v + j));
    acc = vfmaq_f64(acc, vmulq_f64(vld1q_f64(w + j), d), d);
  }
  double r = vaddvq_f64(acc);
  for (; j < n; ++j) {
    const double d = s - v[j];
    r += w[j] * d * d;
  }
  return r;
}

}  // namespace

const KernelTable* neon_table() noexcept {
  static const KernelTable t{Backend::neon,       dot_neon,
                             sum_squares_neon,    matvec_neon,
                             matvec_transposed_neon, lorentz_row_neon,
                             sqdiff_row_neon};
  return &t;
}

}  // namespace nlab::simd::detail

#else

namespace nlab::simd::detail {
const KernelTable* neon_table() noexcept { return nullptr; }
}  // namespace nlab::simd::detail

#endif
