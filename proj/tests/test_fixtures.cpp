#include <algorithm>
#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nlab/cut_norm.hpp"
#include "nlab/experiments.hpp"
#include "nlab/fixtures.hpp"
#include "support.hpp"

using namespace nlab;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

TEST_CASE("dirac fixture") {
  for (int dim : {1, 2}) {
    auto g = make_grid(dim, 9);
    const Fixture f = example_fixture("dirac", g);
    REQUIRE(f.measure);
    REQUIRE(f.measure->atom_list().size() == 1u);
    const Atom& a = f.measure->atom_list()[0];
    CHECK(a.mass == 1.0);
    CHECK(a.x[0] == 0.5);
    CHECK(a.y[0] == 0.5);
    if (dim == 2) CHECK(a.x[1] == 0.5);
    CHECK(total_mass(*f.measure) == 1.0);
  }
  CHECK_THROWS_AS(example_fixture("nope", make_grid(1, 8)), std::invalid_argument);
}

TEST_CASE("log-log density follows the printed formula") {
  for (double x : {-0.9, -0.3, 0.004, 0.01, 0.2, 0.75}) {
    const double a = std::abs(x);
    const double want =
        1.0 / (a * std::log(a) * std::log(std::abs(std::log(a))) *
               std::pow(std::log(std::abs(std::log(std::abs(std::log(a))))), 2));
    CHECK(loglog_m(x) == Approx(want).epsilon(1e-14));
    CHECK(loglog_m(-x) == loglog_m(x));
  }
  // 1/log(log(log(1/x))) is an antiderivative of |m| below the cutoff
  auto prim = [](double x) { return 1.0 / std::log(std::log(std::log(1.0 / x))); };
  for (double x : {1e-6, 1e-4, 1e-3, 5e-3, 0.01}) {
    const double step = x * 1e-5;
    const double fd = (prim(x + step) - prim(x - step)) / (2 * step);
    CHECK(fd == Approx(std::abs(loglog_m(x))).epsilon(1e-7));
  }
  CHECK(kLoglogCutoff == Approx(std::exp(-std::exp(1.5))).epsilon(1e-15));
}

TEST_CASE("log-log fixture masses and refinement") {
  auto g = make_grid(1, 64);
  const Fixture f = example_fixture("loglog_density", g);
  REQUIRE(f.measure);
  const double marginal = 2.0 / std::log(1.5);
  CHECK(total_mass(*f.measure) == Approx(marginal * marginal).epsilon(1e-12));
  const auto rows = loglog_refinement({16, 64, 256, 1024});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].mass == Approx(marginal * marginal).epsilon(1e-12));
    if (i > 0) CHECK(rows[i].w_integral > rows[i - 1].w_integral);
  }
  CHECK_THROWS_AS(loglog_refinement({15}), std::invalid_argument);
  CHECK(loglog_w(0.5, 0.5) == 0.0);
  CHECK(loglog_w(0.01, 0.0) == Approx(std::log(-std::log(0.01))));
}

TEST_CASE("listing") {
  const auto rows = list_fixtures();
  CHECK(std::is_sorted(rows.begin(), rows.end()));
  auto has = [&](const char* id) {
    return std::any_of(rows.begin(), rows.end(), [&](const auto& r) { return r.first == id; });
  };
  for (const char* id : {"dirac", "loglog_density", "oscillating_density", "mollified_dirac", "product_sequence",
                         "homogenization", "constant"})
    CHECK(has(id));
}

TEST_CASE("homogenized coefficient") {
  CHECK(homogenized_coefficient(1, 4, 2) == Approx(1.6).epsilon(1e-15));
  CHECK(homogenized_coefficient(1, 4, 2) == Approx(2.0 * 1 * 4 / (1.0 + 4.0)).epsilon(1e-15));
  CHECK(homogenized_coefficient(1, 4, 3) == Approx(1.0 / (0.75 * 0.75)).epsilon(1e-14));
  CHECK(homogenized_coefficient(2, 2, 1.5) == Approx(2.0).epsilon(1e-14));
  CHECK(two_phase_coefficient(0.1, 1, 4, 1) == 1.0);
  CHECK(two_phase_coefficient(0.6, 1, 4, 1) == 4.0);
  CHECK(two_phase_coefficient(0.3, 1, 4, 2) == 4.0);
}

TEST_CASE("family argument checks") {
  CHECK_THROWS_AS(make_family("homogenization", make_grid(2, 8)), std::invalid_argument);
  CHECK_THROWS_AS(make_family("nope", make_grid(1, 8)), std::invalid_argument);
  const SequenceFamily f = make_family("oscillating_density", make_grid(1, 31));
  CHECK_NOTHROW(f.measure(4));
  CHECK_THROWS_AS(f.measure(5), std::invalid_argument);
  CHECK_THROWS_AS(f.measure(0), std::invalid_argument);
}

TEST_CASE("every family is mass-preserving for even k") {
  for (const std::string& id : family_ids()) {
    CAPTURE(id);
    auto g = make_grid(1, 127);
    const SequenceFamily fam = make_family(id, g);
    const double m = total_mass(fam.limit_measure);
    for (int k : {2, 4, 8, 16}) {
      CHECK(std::abs(total_mass(fam.measure(k)) - m) <= 1e-10);
      CHECK_FALSE(fam.measure(k).is_signed());
    }
  }
}

TEST_CASE("odd k of the sine-product density carries the predicted excess mass") {
  // (int_0^1 sin(k pi x) dx)^2 = 4 / (k pi)^2 for odd k
  auto g = make_grid(1, 511);
  const SequenceFamily fam = make_family("oscillating_density", g);
  for (int k : {1, 3, 5}) {
    const double excess = total_mass(fam.measure(k)) - 1.0;
    CHECK(excess == Approx(4.0 / (k * k * kPi * kPi)).epsilon(1e-4));
  }
}

TEST_CASE("cut-norm distances to the limit are nonincreasing beyond k = 2") {
  for (const std::string& id : family_ids()) {
    CAPTURE(id);
    auto g = make_grid(1, 127);
    const SequenceFamily fam = make_family(id, g);
    double prev = INFINITY;
    std::vector<double> norms;
    for (int k = 2; k <= 16; ++k) {
      const double d = cut_distance(fam.measure(k), fam.limit_measure, 2.0);
      CAPTURE(k);
      CHECK(d <= prev + 1e-12);
      prev = d;
      norms.push_back(cut_norm_exact_p2(fam.measure(k)).value);
    }
    // lower semicontinuity witness: against the minimum when the norms are
    // nonincreasing, otherwise against the last norm plus the last distance
    const double limit = cut_norm_exact_p2(fam.limit_measure).value;
    if (std::is_sorted(norms.rbegin(), norms.rend()))
      CHECK(limit <= norms.back() + 1e-6);
    else
      CHECK(limit <= norms.back() + prev + 1e-12);
  }
}

TEST_CASE("pairings converge no slower than the cut-norm distance") {
  auto g = make_grid(1, 127);
  std::vector<std::pair<GridFunction, GridFunction>> pairs;
  for (int a = 1; a <= 5; ++a)
    for (int b = 1; b <= 4; ++b) {
      GridFunction phi = GridFunction::sample(g, [a](const Point& x) { return std::sin(a * kPi * x[0]); });
      GridFunction psi = GridFunction::sample(g, [b](const Point& x) {
        return x[0] * (1 - x[0]) * (1 + b * x[0]) + 0.1 * std::sin(b * kPi * x[0]);
      });
      phi = (1.0 / sobolev_norm(phi, 2.0)) * phi;
      psi = (1.0 / sobolev_norm(psi, 2.0)) * psi;
      pairs.emplace_back(phi, psi);
    }
  REQUIRE(pairs.size() == 20u);
  for (const char* id : {"oscillating_density", "mollified_dirac", "product_sequence"}) {
    CAPTURE(id);
    const SequenceFamily fam = make_family(id, g);
    for (int k : {1, 2, 4, 8, 16}) {
      const PairMeasure mk = fam.measure(k);
      const double d = cut_distance(mk, fam.limit_measure, 2.0);
      double worst = 0.0;
      for (const auto& [phi, psi] : pairs)
        worst = std::max(worst, std::abs(pair_integral(mk, phi, psi) - pair_integral(fam.limit_measure, phi, psi)));
      CHECK(worst <= d + 1e-12);
    }
  }
}

TEST_CASE("mollified point masses approach the point mass under refinement") {
  std::vector<double> d;
  for (int n : {63, 127, 255, 511}) {
    auto g = make_grid(1, n);
    const SequenceFamily fam = make_family("mollified_dirac", g);
    d.push_back(cut_distance(fam.measure((n + 1) / 8), fam.limit_measure, 2.0));
  }
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(d[i] < 0.75 * d[i - 1]);
}

TEST_CASE("oscillating family distances follow the closed form") {
  auto g = make_grid(1, 255);
  const SequenceFamily fam = make_family("oscillating_density", g);
  for (int k : {1, 2, 4}) {
    const double d = cut_distance(fam.measure(k), fam.limit_measure, 2.0);
    CHECK(d == Approx(1.0 / (2.0 * k * k * kPi * kPi)).epsilon(0.1));
  }
}
