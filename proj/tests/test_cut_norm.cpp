#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nlab/cut_norm.hpp"
#include "support.hpp"

using namespace nlab;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

namespace {

Vector stencil_vector(const Grid& g, const Point& x) {
  const Stencil s = interpolation_stencil(g, x);
  Vector l = Vector::Zero(g.num_nodes());
  for (int i = 0; i < s.size; ++i) l[s.node[i]] += s.weight[i];
  return l;
}

PairMeasure sine_product_density(const GridPtr& g, int k) {
  const Vector& q = g->quadrature_weights();
  Vector s(g->num_nodes());
  for (int i = 0; i < g->num_nodes(); ++i) s[i] = std::sin(k * kPi * g->nodes()[i][0]) * q[i];
  return PairMeasure::cell_density(g, DenseMatrix(s * s.transpose()), true);
}

// max over subset pairs of |sum_{S x T} w|, by full enumeration of both sides
double reference_graphon(const DenseMatrix& w) {
  const int n = static_cast<int>(w.rows());
  double best = 0.0;
  for (int a = 0; a < (1 << n); ++a)
    for (int b = 0; b < (1 << n); ++b) {
      double s = 0.0;
      for (int i = 0; i < n; ++i)
        if (a >> i & 1)
          for (int j = 0; j < n; ++j)
            if (b >> j & 1) s += w(i, j);
      best = std::max(best, std::abs(s));
    }
  return best;
}

}  // namespace

TEST_CASE("zero measure has zero cut norm") {
  auto g = make_grid(1, 6);
  const PairMeasure z = PairMeasure::zero(g);
  CHECK(cut_norm_exact_p2(z).value == 0.0);
  CHECK(cut_norm_alternating(z, 3.0, 1, 4).value == 0.0);
  CHECK(cut_norm_bruteforce(z, 2.0, 1000, 1).value == 0.0);
  CHECK(graphon_cut_norm(z, GraphonMode::subset_exact).value == 0.0);
}

TEST_CASE("exact p=2 value against an eigendecomposition oracle") {
  testing::Rng rng(31);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = make_grid(trial % 2 + 1, trial % 2 ? 4 : 9);
    const PairMeasure mu = testing::random_density(g, rng, trial % 3 == 0);
    const CutNormResult r = cut_norm_exact_p2(mu);
    CHECK_FALSE(r.lower_bound);
    const double want = testing::reference_cut_norm_p2(*g, Eigen::MatrixXd(mu.pairing_matrix()));
    CHECK(r.value == Approx(want).epsilon(1e-10));
    CHECK(sobolev_norm(r.phi, 2.0) == Approx(1.0).epsilon(1e-10));
    CHECK(sobolev_norm(r.psi, 2.0) == Approx(1.0).epsilon(1e-10));
    CHECK(pair_integral(mu, r.phi, r.psi) == Approx(r.value).epsilon(1e-10));
  }
}

TEST_CASE("point mass at the centre against the Green's function") {
  double prev = 1.0;
  for (int n : {32, 64, 128}) {
    auto g = make_grid(1, n);
    const PairMeasure d = PairMeasure::atoms(g, {Atom{Point{0.5, 0}, Point{0.5, 0}, 1.0}});
    const double v = cut_norm_exact_p2(d).value;
    const Vector l = stencil_vector(*g, Point{0.5, 0});
    const double green = l.dot(testing::reference_stiffness(*g).ldlt().solve(l));
    CHECK(v == Approx(green).epsilon(1e-12));
    const double err = std::abs(v - 0.25);
    CHECK(err <= 3.0 * g->h());
    CHECK(err < prev);
    prev = err;
    CHECK(cut_norm_alternating(d, 2.0, 0, 2).value == Approx(v).epsilon(1e-9));
  }
}

TEST_CASE("signed sine-product density") {
  for (int k : {1, 2, 4}) {
    auto g = make_grid(1, 255);
    const double v = cut_norm_exact_p2(sine_product_density(g, k)).value;
    const double want = 1.0 / (2.0 * k * k * kPi * kPi);
    CHECK(std::abs(v - want) <= 20.0 * k * k * g->h() * g->h() * want);
  }
}

TEST_CASE("product measures factor into dual norms") {
  testing::Rng rng(32);
  for (int trial = 0; trial < 10; ++trial) {
    auto g = make_grid(1, 7);
    const Vector a = testing::random_vector(rng, 7, 0.0, 1.0);
    const Vector b = testing::random_vector(rng, 7, 0.0, 1.0);
    const PairMeasure mu = PairMeasure::product(MarginalMeasure(g, a), MarginalMeasure(g, b));
    const double want2 = dual_norm(g, a, 2.0).value * dual_norm(g, b, 2.0).value;
    CHECK(cut_norm_exact_p2(mu).value == Approx(want2).epsilon(1e-10));
    CHECK(cut_norm_alternating(mu, 2.0, trial, 2).value == Approx(want2).epsilon(1e-6));
    for (double p : {1.5, 3.0}) {
      const double want = dual_norm(g, a, p).value * dual_norm(g, b, p).value;
      CHECK(cut_norm_alternating(mu, p, trial, 2).value == Approx(want).epsilon(1e-6));
    }
  }
}

TEST_CASE("alternating and brute force against the exact value") {
  testing::Rng rng(33);
  for (int trial = 0; trial < 50; ++trial) {
    auto g = make_grid(1, 4 + trial % 5);
    const PairMeasure mu = testing::random_density(g, rng, trial % 2 == 1);
    const double exact = cut_norm_exact_p2(mu).value;
    const CutNormResult alt = cut_norm_alternating(mu, 2.0, trial, 8);
    CHECK(alt.lower_bound);
    CHECK(std::abs(alt.value - exact) <= 1e-6);
    if (g->n() == 4) {
      const double brute = cut_norm_bruteforce(mu, 2.0, 100000, trial).value;
      CHECK(brute <= exact + 1e-10);
      CHECK(brute >= 0.95 * exact);
    }
  }
}

TEST_CASE("reported pairs realise the reported value at p != 2") {
  testing::Rng rng(34);
  for (int trial = 0; trial < 20; ++trial) {
    auto g = make_grid(1, 6);
    const PairMeasure mu = testing::random_density(g, rng, true);
    for (double p : {1.5, 3.0}) {
      const CutNormResult a = cut_norm_alternating(mu, p, trial, 4);
      CHECK(sobolev_norm(a.phi, p) == Approx(1.0).epsilon(1e-8));
      CHECK(sobolev_norm(a.psi, p) == Approx(1.0).epsilon(1e-8));
      CHECK(pair_integral(mu, a.phi, a.psi) == Approx(a.value).epsilon(1e-8));
      const CutNormResult b = cut_norm_bruteforce(mu, p, 5000, trial);
      CHECK(pair_integral(mu, b.phi, b.psi) / (sobolev_norm(b.phi, p) * sobolev_norm(b.psi, p)) ==
            Approx(b.value).epsilon(1e-10));
    }
  }
}

TEST_CASE("norm axioms of the exact value") {
  testing::Rng rng(35);
  std::uniform_real_distribution<double> c(-4.0, 4.0);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = make_grid(1, 6);
    const PairMeasure a = testing::random_density(g, rng, true);
    const PairMeasure b = testing::random_density(g, rng, true);
    const double s = c(rng);
    const double na = cut_norm_exact_p2(a).value;
    CHECK(std::abs(cut_norm_exact_p2(a.scaled(s)).value - std::abs(s) * na) <= 1e-10);
    CHECK(cut_norm_exact_p2(a + b).value <= na + cut_norm_exact_p2(b).value + 1e-12);
  }
}

TEST_CASE("cut norm is dominated by the dual norm on the product grid") {
  testing::Rng rng(36);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 6;
    auto g = make_grid(1, n);
    auto g2 = make_grid(2, n);
    const PairMeasure mu = testing::random_density(g, rng, trial % 2 == 0);
    const DenseMatrix m = mu.pairing_matrix();
    Vector l(n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) l[g2->index(i + 1, j + 1)] = m(i, j);
    CHECK(cut_norm_exact_p2(mu).value <= dual_norm(g2, l, 2.0).value + 1e-12);
  }
}

TEST_CASE("graphon cut norm") {
  auto g = make_grid(1, 127);
  const DenseMatrix w = Vector(g->quadrature_weights()) * Vector(g->quadrature_weights()).transpose();
  CHECK(graphon_cut_norm(PairMeasure::cell_density(g, w), GraphonMode::alternating).value ==
        Approx(1.0).epsilon(1e-12));
  const PairMeasure s2 = PairMeasure::from_density(
      g, [](const Point& x, const Point&) { return std::sin(2 * kPi * x[0]); }, true);
  const GraphonCutResult r = graphon_cut_norm(s2, GraphonMode::alternating);
  CHECK(std::abs(r.value - 1.0 / kPi) <= 2.0 * g->h());

  testing::Rng rng(37);
  for (int trial = 0; trial < 20; ++trial) {
    auto gs = make_grid(1, 3 + trial % 4);
    const PairMeasure mu = testing::random_density(gs, rng, true);
    const GraphonCutResult ex = graphon_cut_norm(mu, GraphonMode::subset_exact);
    CHECK(ex.exact);
    CHECK(ex.value == Approx(reference_graphon(mu.pairing_matrix())).epsilon(1e-12));
    CHECK(graphon_cut_norm(mu, GraphonMode::alternating, trial).value <= ex.value + 1e-12);
  }
  for (int trial = 0; trial < 10; ++trial) {
    auto gs = make_grid(1, 10);
    const PairMeasure mu = testing::random_density(gs, rng, true);
    CHECK(graphon_cut_norm(mu, GraphonMode::alternating, trial).value <=
          graphon_cut_norm(mu, GraphonMode::subset_exact).value + 1e-12);
  }
  CHECK_THROWS_AS(graphon_cut_norm(PairMeasure::zero(make_grid(1, 15)), GraphonMode::subset_exact),
                  std::invalid_argument);
}

TEST_CASE("size caps and argument checks") {
  CHECK_THROWS_AS(cut_norm_exact_p2(PairMeasure::zero(make_grid(2, 65))), std::invalid_argument);
  CHECK_THROWS_AS(cut_norm_bruteforce(PairMeasure::zero(make_grid(1, 65)), 2.0, 10, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cut_norm_alternating(PairMeasure::zero(make_grid(1, 5)), 2.0, 0, 0),
                  std::invalid_argument);
  CHECK_THROWS_AS(cut_norm_alternating(PairMeasure::zero(make_grid(1, 5)), 1.0, 0, 2),
                  std::invalid_argument);
}

TEST_CASE("seeded results are reproducible") {
  testing::Rng rng(38);
  auto g = make_grid(1, 8);
  const PairMeasure mu = testing::random_density(g, rng, true);
  const CutNormResult a = cut_norm_alternating(mu, 3.0, 99, 5);
  const CutNormResult b = cut_norm_alternating(mu, 3.0, 99, 5);
  CHECK(a.value == b.value);
  CHECK((a.phi - b.phi).values().norm() == 0.0);
  const CutNormResult c = cut_norm_bruteforce(mu, 1.5, 3000, 7);
  const CutNormResult d = cut_norm_bruteforce(mu, 1.5, 3000, 7);
  CHECK(c.value == d.value);
}

TEST_CASE("iterative top singular triple agrees with the dense SVD") {
  testing::Rng rng(39);
  const int n = 600;
  DenseMatrix m(n, n);
  std::normal_distribution<double> nd;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = nd(rng) / n;
  // give it a clear top direction
  const Vector a = testing::random_vector(rng, n);
  const Vector b = testing::random_vector(rng, n);
  m += 0.5 * a.normalized() * b.normalized().transpose();
  const auto dense = detail::top_singular_triple(m, 10000);
  const auto lanczos = detail::top_singular_triple(m, 100);
  CHECK(lanczos.sigma == Approx(dense.sigma).epsilon(1e-12));
  CHECK(std::abs(std::abs(lanczos.left.dot(dense.left)) - 1.0) < 1e-8);
  CHECK(std::abs(std::abs(lanczos.right.dot(dense.right)) - 1.0) < 1e-8);
}
