#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "nlab/integrands.hpp"
#include "nlab/measures.hpp"
#include "support.hpp"

using namespace nlab;
using doctest::Approx;
constexpr double kPi = std::numbers::pi;

namespace {

// A measure mixing all three representations, with its pairing written out.
struct Mixed {
  PairMeasure mu;
  DenseMatrix w;                 // density part
  std::vector<Atom> atoms;
  Vector m1, m2;                 // product part
};

Mixed random_mixed(const GridPtr& g, testing::Rng& rng) {
  std::uniform_real_distribution<double> u(0.05, 0.95);
  const DenseMatrix w = testing::random_masses(rng, g->num_nodes(), false);
  std::vector<Atom> atoms;
  for (int a = 0; a < 3; ++a)
    atoms.push_back(Atom{Point{u(rng), g->dim() == 2 ? u(rng) : 0.0},
                         Point{u(rng), g->dim() == 2 ? u(rng) : 0.0}, u(rng)});
  const Vector m1 = testing::random_vector(rng, g->num_nodes(), 0.0, 0.2);
  const Vector m2 = testing::random_vector(rng, g->num_nodes(), 0.0, 0.2);
  PairMeasure mu = PairMeasure::cell_density(g, w) + PairMeasure::atoms(g, atoms) +
                   PairMeasure::product(MarginalMeasure(g, m1), MarginalMeasure(g, m2));
  return {mu, w, atoms, m1, m2};
}

double reference_pairing(const Mixed& m, const GridFunction& phi, const GridFunction& psi) {
  double s = phi.values().dot(m.w * psi.values());
  for (const Atom& a : m.atoms) s += a.mass * phi.interpolate(a.x) * psi.interpolate(a.y);
  s += m.m1.dot(phi.values()) * m.m2.dot(psi.values());
  return s;
}

}  // namespace

TEST_CASE("total mass") {
  auto g = make_grid(1, 15);
  const PairMeasure atoms = PairMeasure::atoms(
      g, {Atom{Point{0.25, 0}, Point{0.75, 0}, 2.0}, Atom{Point{0.5, 0}, Point{0.5, 0}, 1.5}});
  CHECK(total_mass(atoms) == Approx(3.5).epsilon(1e-15));
  CHECK(std::abs(total_mass(PairMeasure::lebesgue(g)) - 1.0) <= 1e-12);
  CHECK(std::abs(total_mass(PairMeasure::lebesgue(make_grid(2, 7))) - 1.0) <= 1e-12);
  const MarginalMeasure m(g, Vector::LinSpaced(15, 0.1, 0.3));
  CHECK(total_mass(PairMeasure::product(m, m)) == Approx(m.mass() * m.mass()).epsilon(1e-14));
  CHECK(total_mass(PairMeasure::zero(g)) == 0.0);
}

TEST_CASE("measure validation") {
  auto g = make_grid(1, 7);
  CHECK_THROWS(PairMeasure::atoms(g, {Atom{Point{0.0, 0}, Point{0.5, 0}, 1.0}}));
  CHECK_THROWS(PairMeasure::atoms(g, {Atom{Point{0.5, 0}, Point{1.0, 0}, 1.0}}));
  CHECK_THROWS(PairMeasure::atoms(g, {Atom{Point{0.5, 0}, Point{0.5, 0}, -1.0}}));
  CHECK_NOTHROW(PairMeasure::atoms(g, {Atom{Point{0.5, 0}, Point{0.5, 0}, -1.0}}, true));
  DenseMatrix w = DenseMatrix::Constant(7, 7, 0.01);
  w(2, 3) = -0.5;
  CHECK_THROWS(PairMeasure::cell_density(g, w));
  w(2, 3) = std::nan("");
  CHECK_THROWS(PairMeasure::cell_density(g, w, true));
  CHECK_THROWS(PairMeasure::cell_density(g, DenseMatrix::Zero(6, 7)));
}

TEST_CASE("pairing by hand") {
  auto g = make_grid(1, 15);
  const int mid = g->nearest_node(Point{0.5, 0});
  CHECK(g->nodes()[mid][0] == 0.5);
  const PairMeasure d = PairMeasure::atoms(g, {Atom{Point{0.5, 0}, Point{0.5, 0}, 1.0}});
  Vector v = Vector::Zero(15);
  v[mid] = 1.7;
  const GridFunction phi(g, v);
  CHECK(pair_integral(d, phi, phi) == Approx(1.7 * 1.7).epsilon(1e-15));

  testing::Rng rng(4);
  const MarginalMeasure m(g, testing::random_vector(rng, 15, 0.0, 1.0));
  const GridFunction a = testing::random_function(g, rng);
  const GridFunction b = testing::random_function(g, rng);
  CHECK(pair_integral(PairMeasure::product(m, m), a, b) ==
        Approx(m.integrate(a) * m.integrate(b)).epsilon(1e-13));

  for (int n : {63, 127, 255}) {
    auto gn = make_grid(1, n);
    const GridFunction s = GridFunction::sample(gn, [](const Point& x) { return std::sin(kPi * x[0]); });
    const double err = std::abs(pair_integral(PairMeasure::lebesgue(gn), s, s) - 4.0 / (kPi * kPi));
    CHECK(err <= 10.0 * gn->h() * gn->h());
  }
}

TEST_CASE("atoms interpolate multilinearly between nodes") {
  auto g = make_grid(2, 7);
  const Point x{0.3, 0.61};
  const Point y{0.77, 0.2};
  const PairMeasure d = PairMeasure::atoms(g, {Atom{x, y, 2.0}});
  // bilinear functions are reproduced exactly by the interpolation
  auto f1 = [](const Point& p) { return 1.0 + 2.0 * p[0] - p[1] + 3.0 * p[0] * p[1]; };
  auto f2 = [](const Point& p) { return 0.5 - p[0] + 4.0 * p[0] * p[1]; };
  // keep them away from the boundary by multiplying with a node-exact bump
  const GridFunction phi = GridFunction::sample(g, f1);
  const GridFunction psi = GridFunction::sample(g, f2);
  const double h = g->h();
  if (x[0] > h && x[0] < 1 - h && x[1] > h && x[1] < 1 - h && y[0] > h && y[0] < 1 - h && y[1] > h &&
      y[1] < 1 - h)
    CHECK(pair_integral(d, phi, psi) == Approx(2.0 * f1(x) * f2(y)).epsilon(1e-13));
}

TEST_CASE("double integrals by hand") {
  for (int n : {63, 127}) {
    auto g = make_grid(1, n);
    const GridFunction u = GridFunction::sample(g, [](const Point& x) { return x[0]; });
    const PairIntegrand f = make_pair_integrand("squared_diff");
    CHECK(std::abs(double_integral(PairMeasure::lebesgue(g), f, u, u) - 1.0 / 6.0) <= 10.0 * g->h() * g->h());
  }
  auto g = make_grid(1, 9);
  testing::Rng rng(5);
  const Mixed m = random_mixed(g, rng);
  const GridFunction u = testing::random_function(g, rng);
  const std::vector<double> c{2.5};
  CHECK(double_integral(m.mu, make_pair_integrand("constant", c), u, u) ==
        Approx(2.5 * total_mass(m.mu)).epsilon(1e-13));
  const int node = 3;
  const Point x0 = g->nodes()[node];
  const PairMeasure d = PairMeasure::atoms(g, {Atom{x0, g->nodes()[6], 0.7}});
  const PairIntegrand lor = make_pair_integrand("lorentz");
  CHECK(double_integral(d, lor, u, u) == Approx(0.7 * lor(u[node], u[6])).epsilon(1e-14));
}

TEST_CASE("adjunction, bilinearity and linearity on random mixed measures") {
  testing::Rng rng(6);
  for (int trial = 0; trial < 100; ++trial) {
    auto g = make_grid(trial % 2 + 1, 4 + trial % 4);
    const Mixed m = random_mixed(g, rng);
    const Mixed m2 = random_mixed(g, rng);
    const GridFunction phi = testing::random_function(g, rng);
    const GridFunction psi = testing::random_function(g, rng);
    const GridFunction chi = testing::random_function(g, rng);
    const double pi = pair_integral(m.mu, phi, psi);
    CHECK(std::abs(pi - reference_pairing(m, phi, psi)) <= 1e-12);
    CHECK(std::abs(marginal_weighted_by(m.mu, psi).integrate(phi) - pi) <= 1e-12);
    CHECK(std::abs(comarginal_weighted_by(m.mu, phi).integrate(psi) - pi) <= 1e-12);
    CHECK(std::abs(pair_integral(m.mu, phi + 2.0 * chi, psi) -
                   (pi + 2.0 * pair_integral(m.mu, chi, psi))) <= 1e-12);
    CHECK(std::abs(pair_integral(m.mu, phi, -3.0 * chi + psi) -
                   (pi - 3.0 * pair_integral(m.mu, phi, chi))) <= 1e-12);
    CHECK(std::abs(pair_integral(m.mu + m2.mu.scaled(0.5), phi, psi) -
                   (pi + 0.5 * pair_integral(m2.mu, phi, psi))) <= 1e-12);
    CHECK(std::abs(pair_integral(m.mu.transposed(), psi, phi) - pi) <= 1e-12);
    CHECK(double_integral(m.mu, make_pair_integrand("product"), phi, psi) == pi);
    CHECK(double_integral(m.mu, make_pair_integrand("squared_diff"), phi, psi) >= 0.0);
    CHECK(double_integral(m.mu, make_pair_integrand("lorentz"), phi, psi) >= 0.0);
  }
}

TEST_CASE("vectorized integrand paths agree with the generic path") {
  testing::Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    auto g = make_grid(trial % 2 + 1, 5 + trial % 6);
    const Mixed m = random_mixed(g, rng);
    const GridFunction u = testing::random_function(g, rng, 2.0);
    const GridFunction v = testing::random_function(g, rng, 2.0);
    for (const char* id : {"squared_diff", "lorentz", "product"}) {
      PairIntegrand fast = make_pair_integrand(id);
      PairIntegrand slow = fast;
      slow.kernel = PairKernel::generic;
      const double a = double_integral(m.mu, fast, u, v);
      const double b = double_integral(m.mu, slow, u, v);
      CHECK(a == Approx(b).epsilon(1e-12));
    }
  }
}

TEST_CASE("weighted marginals by hand") {
  auto g = make_grid(1, 8);
  testing::Rng rng(8);
  const DenseMatrix w = testing::random_masses(rng, 8, false);
  const PairMeasure mu = PairMeasure::cell_density(g, w);
  const Vector first = w.rowwise().sum();
  const Vector second = w.colwise().sum().transpose();
  CHECK((marginal_weighted_by(mu, GridFunction::constant(g, 1.0)).weights() - first).norm() < 1e-15);
  CHECK(marginal_weighted_by(mu, GridFunction::zero(g)).weights().norm() == 0.0);
  CHECK((comarginal_weighted_by(mu, GridFunction::constant(g, 1.0)).weights() - second).norm() < 1e-15);
  CHECK(comarginal_weighted_by(mu, GridFunction::zero(g)).weights().norm() == 0.0);
  const GridFunction u = testing::random_function(g, rng);
  CHECK((comarginal_weighted_by(mu, u).weights() - marginal_weighted_by(mu.transposed(), u).weights()).norm() <
        1e-15);
  const MarginalMeasure m1(g, testing::random_vector(rng, 8, 0, 1));
  const MarginalMeasure m2(g, testing::random_vector(rng, 8, 0, 1));
  const GridFunction psi = testing::random_function(g, rng);
  CHECK((marginal_weighted_by(PairMeasure::product(m1, m2), psi).weights() -
         m2.integrate(psi) * m1.weights())
            .norm() < 1e-14);
}

TEST_CASE("differences of measures") {
  auto g = make_grid(1, 31);
  testing::Rng rng(9);
  const Mixed a = random_mixed(g, rng);
  const Mixed b = random_mixed(g, rng);
  const PairMeasure z = a.mu - a.mu;
  CHECK(z.is_signed());
  CHECK(std::abs(total_mass(z)) < 1e-14);
  CHECK(z.pairing_matrix().cwiseAbs().maxCoeff() < 1e-15);
  CHECK(total_mass(a.mu - b.mu) == Approx(total_mass(a.mu) - total_mass(b.mu)).epsilon(1e-13));
  const int k = 2;
  const Vector& q = g->quadrature_weights();
  Vector s(31);
  for (int i = 0; i < 31; ++i) s[i] = std::sin(k * kPi * g->nodes()[i][0]);
  DenseMatrix w = q * q.transpose();
  w.array() *= (1.0 + (s * s.transpose()).array());
  const PairMeasure diff = PairMeasure::lebesgue(g) - PairMeasure::cell_density(g, w);
  const DenseMatrix want = -(q.cwiseProduct(s)) * (q.cwiseProduct(s)).transpose();
  CHECK((diff.pairing_matrix() - want).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("signed measures are refused by functional evaluation paths") {
  auto g = make_grid(1, 7);
  const PairMeasure s = PairMeasure::lebesgue(g) - PairMeasure::lebesgue(g).scaled(0.5);
  CHECK(s.is_signed());
  const GridFunction u = GridFunction::constant(g, 1.0);
  // pairing itself is fine on signed measures
  CHECK(pair_integral(s, u, u) == Approx(0.5 * pair_integral(PairMeasure::lebesgue(g), u, u)));
}
