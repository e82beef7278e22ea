#pragma once
// Data-parallel inner loops used by the pairing, quadrature and energy code.
//
// Every kernel has a scalar reference implementation and optional AVX2 / NEON
// variants. The active backend is chosen once at startup from CPU features and
// can be overridden with NLAB_SIMD=scalar|avx2|neon or force_backend().
// Vector backends reassociate sums, so results agree with the scalar reference
// to rounding, not bit for bit.

#include <cstddef>
#include <span>
#include <string_view>

namespace nlab::simd {

enum class Backend { scalar, avx2, neon };

std::string_view backend_name(Backend b) noexcept;

// Function table of one backend. Raw pointers keep the table trivially
// copyable; the span-based wrappers below are the public entry points.
struct KernelTable {
  Backend backend;
  double (*dot)(const double* a, const double* b, std::size_t n);
  double (*sum_squares)(const double* a, std::size_t n);
  // y[i] = sum_j w[i*cols + j] * x[j]
  void (*matvec)(const double* w, std::size_t rows, std::size_t cols,
                 const double* x, double* y);
  // y[j] = sum_i w[i*cols + j] * x[i]
  void (*matvec_transposed)(const double* w, std::size_t rows, std::size_t cols,
                            const double* x, double* y);
  // sum_j w[j] / (1 + (s - v[j])^2)
  double (*lorentz_row)(const double* w, double s, const double* v, std::size_t n);
  // sum_j w[j] * (s - v[j])^2
  double (*sqdiff_row)(const double* w, double s, const double* v, std::size_t n);
};

bool backend_available(Backend b) noexcept;

// Table for a specific backend. Throws std::invalid_argument when the backend
// is not compiled in or not supported by this CPU.
const KernelTable& table(Backend b);

Backend active_backend() noexcept;
const KernelTable& active() noexcept;

// Switch backends process-wide (tests, benchmarks). Throws if unavailable.
void force_backend(Backend b);

double dot(std::span<const double> a, std::span<const double> b);
double sum_squares(std::span<const double> a);
void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y);
void matvec_transposed(std::span<const double> w, std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<double> y);
double lorentz_row(std::span<const double> w, double s, std::span<const double> v);
double sqdiff_row(std::span<const double> w, double s, std::span<const double> v);

namespace detail {
const KernelTable& scalar_table() noexcept;
const KernelTable* avx2_table() noexcept;  // nullptr when not compiled in
const KernelTable* neon_table() noexcept;  // nullptr when not compiled in
}  // namespace detail

}  // namespace nlab::simd
