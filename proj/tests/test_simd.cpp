#include <cmath>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "nlab/simd/kernels.hpp"

using namespace nlab::simd;

namespace {

std::vector<double> random_values(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

std::vector<const KernelTable*> vector_tables() {
  std::vector<const KernelTable*> out;
  for (Backend b : {Backend::avx2, Backend::neon})
    if (backend_available(b)) out.push_back(&table(b));
  return out;
}

bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-13 * (1.0 + scale); }

}  // namespace

TEST_CASE("scalar reference kernels against plain loops") {
  std::mt19937_64 rng(1);
  const KernelTable& s = detail::scalar_table();
  const auto a = random_values(rng, 37);
  const auto b = random_values(rng, 37);
  double dot = 0.0, sq = 0.0, lor = 0.0, sqd = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    sq += a[i] * a[i];
    lor += a[i] / (1.0 + (0.3 - b[i]) * (0.3 - b[i]));
    sqd += a[i] * (0.3 - b[i]) * (0.3 - b[i]);
  }
  CHECK(s.dot(a.data(), b.data(), a.size()) == doctest::Approx(dot).epsilon(1e-14));
  CHECK(s.sum_squares(a.data(), a.size()) == doctest::Approx(sq).epsilon(1e-14));
  CHECK(s.lorentz_row(a.data(), 0.3, b.data(), a.size()) == doctest::Approx(lor).epsilon(1e-14));
  CHECK(s.sqdiff_row(a.data(), 0.3, b.data(), a.size()) == doctest::Approx(sqd).epsilon(1e-14));
}

TEST_CASE("vector backends agree with the scalar reference") {
  const auto tables = vector_tables();
  if (tables.empty()) MESSAGE("no vector backend on this machine; only the scalar path is exercised");
  std::mt19937_64 rng(2);
  const KernelTable& s = detail::scalar_table();
  for (const KernelTable* t : tables) {
    CAPTURE(std::string(backend_name(t->backend)));
    for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 15u, 16u, 17u, 64u, 255u, 1000u}) {
      CAPTURE(n);
      const auto a = random_values(rng, n);
      const auto b = random_values(rng, n);
      double mag = 0.0;
      for (std::size_t i = 0; i < n; ++i) mag += std::abs(a[i]) * (1.0 + std::abs(b[i]) + b[i] * b[i]);
      CHECK(close(t->dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n), mag));
      CHECK(close(t->sum_squares(a.data(), n), s.sum_squares(a.data(), n), mag * 4));
      for (double x : {-1.5, 0.0, 0.7}) {
        CHECK(close(t->lorentz_row(a.data(), x, b.data(), n), s.lorentz_row(a.data(), x, b.data(), n), mag));
        CHECK(close(t->sqdiff_row(a.data(), x, b.data(), n), s.sqdiff_row(a.data(), x, b.data(), n), mag * 4));
      }
      for (std::size_t rows : {1u, 3u, 9u}) {
        const auto w = random_values(rng, rows * n);
        const auto x = random_values(rng, n);
        const auto xr = random_values(rng, rows);
        std::vector<double> y1(rows), y2(rows), z1(n), z2(n);
        t->matvec(w.data(), rows, n, x.data(), y1.data());
        s.matvec(w.data(), rows, n, x.data(), y2.data());
        for (std::size_t i = 0; i < rows; ++i) CHECK(close(y1[i], y2[i], 4.0 * n));
        t->matvec_transposed(w.data(), rows, n, xr.data(), z1.data());
        s.matvec_transposed(w.data(), rows, n, xr.data(), z2.data());
        for (std::size_t j = 0; j < n; ++j) CHECK(close(z1[j], z2[j], 4.0 * rows));
      }
    }
  }
}

TEST_CASE("backend selection") {
  CHECK(backend_available(Backend::scalar));
  const Backend before = active_backend();
  force_backend(Backend::scalar);
  CHECK(active_backend() == Backend::scalar);
  std::vector<double> a{1.0, 2.0, 3.0};
  CHECK(dot(a, a) == 14.0);
  force_backend(before);
  CHECK(active_backend() == before);
  if (!backend_available(Backend::neon)) CHECK_THROWS_AS(force_backend(Backend::neon), std::invalid_argument);
}
