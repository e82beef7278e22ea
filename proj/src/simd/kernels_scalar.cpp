#include "nlab/simd/kernels.hpp"

namespace nlab::simd::detail {
namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

double sum_squares_scalar(const double* a, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * a[i];
  return s;
}

void matvec_scalar(const double* w, std::size_t rows, std::size_t cols, const double* x,
                   double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot_scalar(w + i * cols, x, cols);
}

void matvec_transposed_scalar(const double* w, std::size_t rows, std::size_t cols,
                              const double* x, double* y) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) {
    const double xi = x[i];
    const double* row = w + i * cols;
    for (std::size_t j = 0; j < cols; ++j) y[j] += row[j] * xi;
  }
}

double lorentz_row_scalar(const double* w, double s, const double* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = s - v[j];
    acc += w[j] / (1.0 + d * d);
  }
  return acc;
}

double sqdiff_row_scalar(const double* w, double s, const double* v, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double d = s - v[j];
    acc += w[j] * d * d;
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_table() noexcept {
  static const KernelTable t{Backend::scalar,      dot_scalar,
                             sum_squares_scalar,   matvec_scalar,
                             matvec_transposed_scalar, lorentz_row_scalar,
                             sqdiff_row_scalar};
  return t;
}

}  // namespace nlab::simd::detail
