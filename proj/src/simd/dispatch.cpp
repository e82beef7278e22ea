#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "nlab/simd/kernels.hpp"

namespace nlab::simd {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(NLAB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable* lookup(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return &detail::scalar_table();
    case Backend::avx2:
      return cpu_has_avx2() ? detail::avx2_table() : nullptr;
    case Backend::neon:
      return detail::neon_table();
  }
  return nullptr;
}

const KernelTable* initial_table() noexcept {
  if (const char* env = std::getenv("NLAB_SIMD")) {
    const std::string want(env);
    for (Backend b : {Backend::scalar, Backend::avx2, Backend::neon}) {
      if (want == backend_name(b)) {
        if (const KernelTable* t = lookup(b)) return t;
      }
    }
  }
  if (const KernelTable* t = lookup(Backend::avx2)) return t;
  if (const KernelTable* t = lookup(Backend::neon)) return t;
  return &detail::scalar_table();
}

std::atomic<const KernelTable*>& current() noexcept {
  static std::atomic<const KernelTable*> t{initial_table()};
  return t;
}

void check_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw std::invalid_argument("simd kernel: operand sizes differ");
}

}  // namespace

std::string_view backend_name(Backend b) noexcept {
  switch (b) {
    case Backend::scalar:
      return "scalar";
    case Backend::avx2:
      return "avx2";
    case Backend::neon:
      return "neon";
  }
  return "unknown";
}

bool backend_available(Backend b) noexcept { return lookup(b) != nullptr; }

const KernelTable& table(Backend b) {
  const KernelTable* t = lookup(b);
  if (t == nullptr)
    throw std::invalid_argument("simd backend not available: " +
                                std::string(backend_name(b)));
  return *t;
}

Backend active_backend() noexcept { return active().backend; }

const KernelTable& active() noexcept { return *current().load(std::memory_order_acquire); }

void force_backend(Backend b) { current().store(&table(b), std::memory_order_release); }

double dot(std::span<const double> a, std::span<const double> b) {
  check_same_size(a.size(), b.size());
  return active().dot(a.data(), b.data(), a.size());
}

double sum_squares(std::span<const double> a) {
  return active().sum_squares(a.data(), a.size());
}

void matvec(std::span<const double> w, std::size_t rows, std::size_t cols,
            std::span<const double> x, std::span<double> y) {
  check_same_size(w.size(), rows * cols);
  check_same_size(x.size(), cols);
  check_same_size(y.size(), rows);
  active().matvec(w.data(), rows, cols, x.data(), y.data());
}

void matvec_transposed(std::span<const double> w, std::size_t rows, std::size_t cols,
                       std::span<const double> x, std::span<double> y) {
  check_same_size(w.size(), rows * cols);
  check_same_size(x.size(), rows);
  check_same_size(y.size(), cols);
  active().matvec_transposed(w.data(), rows, cols, x.data(), y.data());
}

double lorentz_row(std::span<const double> w, double s, std::span<const double> v) {
  check_same_size(w.size(), v.size());
  return active().lorentz_row(w.data(), s, v.data(), w.size());
}

double sqdiff_row(std::span<const double> w, double s, std::span<const double> v) {
  check_same_size(w.size(), v.size());
  return active().sqdiff_row(w.data(), s, v.data(), w.size());
}

}  // namespace nlab::simd
