#include "nlab/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "nlab/sobolev.hpp"

namespace nlab {
namespace {

constexpr double kPi = std::numbers::pi;

double sine_product(const Grid& g, const Point& x, int k) {
  double s = std::sin(k * kPi * x[0]);
  if (g.dim() == 2) s *= std::sin(k * kPi * x[1]);
  return s;
}

void require_resolved(const Grid& g, int k, const char* what) {
  if (k < 1) throw std::invalid_argument(std::string(what) + ": k must be >= 1");
  if (g.n() + 1 < 8 * k)
    throw std::invalid_argument(std::string(what) + ": k=" + std::to_string(k) +
                                " is under-resolved (need n+1 >= 8k)");
}

void require_1d(const Grid& g, const char* what) {
  if (g.dim() != 1) throw std::invalid_argument(std::string(what) + ": 1D grids only");
}

PairMeasure oscillating_measure(const GridPtr& grid, int k) {
  require_resolved(*grid, k, "oscillating_density");
  const Grid& g = *grid;
  const int n = g.num_nodes();
  Vector s(n);
  for (int i = 0; i < n; ++i) s[i] = sine_product(g, g.nodes()[static_cast<std::size_t>(i)], k);
  const Vector& q = g.quadrature_weights();
  DenseMatrix w = q * q.transpose();
  w.array() *= (1.0 + (s * s.transpose()).array()).array();
  return PairMeasure::cell_density(grid, std::move(w));
}

PairMeasure mollified_measure(const GridPtr& grid, int k, const Point& c) {
  require_resolved(*grid, k, "mollified_dirac");
  const Grid& g = *grid;
  const double half = 0.5 / k;
  auto tent = [&](const Point& x) {
    double v = std::max(0.0, half - std::abs(x[0] - c[0]));
    if (g.dim() == 2) v *= std::max(0.0, half - std::abs(x[1] - c[1]));
    return v;
  };
  Vector t(g.num_nodes());
  for (int i = 0; i < g.num_nodes(); ++i)
    t[i] = tent(g.nodes()[static_cast<std::size_t>(i)]) * g.quadrature_weights()[i];
  const double mass = t.sum();
  if (!(mass > 0.0)) throw std::invalid_argument("mollified_dirac: bump misses every node");
  t /= mass;
  return PairMeasure::cell_density(grid, DenseMatrix(t * t.transpose()));
}

LocalIntegrand abs_pow(double p) { return make_local_integrand("abs_pow", std::vector<double>{p}); }

LocalIntegrand two_phase(const FamilyParams& fp, int k) {
  return make_local_integrand("two_phase",
                              std::vector<double>{fp.p, fp.alpha, fp.beta, static_cast<double>(k)});
}

struct FamilyInfo {
  const char* id;
  const char* description;
};

constexpr FamilyInfo kFamilies[] = {
    {"constant", "mu_k = Lebesgue on the square, g_k = |xi|^p (stationary)"},
    {"homogenization", "mu_k = Lebesgue, g_k = a(kx)|xi|^p with two-phase a (1D)"},
    {"homogenization_oscillating",
     "rho_k = 1 + sin(k pi x) sin(k pi y), g_k = a(kx)|xi|^p with two-phase a (1D)"},
    {"mollified_dirac", "normalized tent of width 1/k around (x0, x0), limit Dirac mass"},
    {"oscillating_density", "rho_k = 1 + sin(k pi x) sin(k pi y) -> Lebesgue"},
    {"product_sequence", "m_k x m_k with m_k = (1 + sin(2 k pi x)) dx -> Lebesgue x Lebesgue"},
};

constexpr FamilyInfo kMeasures[] = {
    {"dirac", "unit atom at the domain centre (x0, x0)"},
    {"loglog_density", "m x m with the log-log density m on (-1,1) mapped to (0,1)"},
};

PairMeasure dirac(const GridPtr& grid, const Point& c) {
  const Point at{c[0], grid->dim() == 2 ? c[1] : 0.0};
  return PairMeasure::atoms(grid, {Atom{at, at, 1.0}});
}

// Exact mass of |m| over xi in [a, b] (after clipping to the cutoff).
double loglog_mass(double a, double b) {
  auto prim = [](double x) {
    // Odd antiderivative of |m| on (-cutoff, cutoff), zero at 0.
    const double r = std::min(std::abs(x), kLoglogCutoff);
    if (r == 0.0) return 0.0;
    const double v = 1.0 / std::log(std::log(-std::log(r)));
    return x < 0.0 ? -v : v;
  };
  return prim(b) - prim(a);
}

Vector loglog_marginal(const Grid& g) {
  if (g.dim() != 1) throw std::invalid_argument("loglog_density: 1D grids only");
  const int n = g.n();
  const double h = g.h();
  Vector m(n);
  for (int i = 1; i <= n; ++i) {
    const double lo = i == 1 ? 0.0 : (i - 0.5) * h;
    const double hi = i == n ? 1.0 : (i + 0.5) * h;
    m[i - 1] = loglog_mass(2.0 * lo - 1.0, 2.0 * hi - 1.0);
  }
  return m;
}

}  // namespace

double homogenized_coefficient(double alpha, double beta, double p) {
  if (!(alpha > 0.0) || !(beta > 0.0)) throw std::invalid_argument("homogenized_coefficient: coefficients must be > 0");
  validate_p(p, "homogenized_coefficient");
  const double e = -1.0 / (p - 1.0);
  const double mean = 0.5 * (std::pow(alpha, e) + std::pow(beta, e));
  return std::pow(mean, -(p - 1.0));
}

SequenceFamily make_family(std::string_view id, const GridPtr& grid, const FamilyParams& fp) {
  validate_p(fp.p, "make_family");
  const auto info = std::find_if(std::begin(kFamilies), std::end(kFamilies),
                                 [&](const FamilyInfo& f) { return id == f.id; });
  if (info == std::end(kFamilies))
    throw std::invalid_argument("unknown sequence family '" + std::string(id) + "'");
  const double p = fp.p;
  SequenceFamily fam{std::string(id), info->description, grid, fp, {}, {},
                     PairMeasure::lebesgue(grid), abs_pow(p)};
  fam.local = [p](int) { return abs_pow(p); };

  if (id == "constant") {
    fam.measure = [grid](int) { return PairMeasure::lebesgue(grid); };
  } else if (id == "oscillating_density") {
    fam.measure = [grid](int k) { return oscillating_measure(grid, k); };
  } else if (id == "homogenization" || id == "homogenization_oscillating") {
    require_1d(*grid, "homogenization");
    if (!(fp.alpha > 0.0) || !(fp.beta > 0.0))
      throw std::invalid_argument("homogenization: coefficients must be > 0");
    if (id == "homogenization")
      fam.measure = [grid](int) { return PairMeasure::lebesgue(grid); };
    else
      fam.measure = [grid](int k) { return oscillating_measure(grid, k); };
    fam.local = [fp](int k) { return two_phase(fp, k); };
    fam.limit_local = make_local_integrand(
        "scaled_abs_pow", std::vector<double>{p, homogenized_coefficient(fp.alpha, fp.beta, p)});
  } else if (id == "mollified_dirac") {
    const Point c = fp.center;
    fam.measure = [grid, c](int k) { return mollified_measure(grid, k, c); };
    fam.limit_measure = dirac(grid, c);
  } else if (id == "product_sequence") {
    const MarginalMeasure leb = MarginalMeasure::lebesgue(grid);
    fam.measure = [grid](int k) {
      const Grid& g = *grid;
      Vector w(g.num_nodes());
      for (int i = 0; i < g.num_nodes(); ++i)
        w[i] = g.quadrature_weights()[i] *
               (1.0 + std::sin(2.0 * k * kPi * g.nodes()[static_cast<std::size_t>(i)][0]));
      const MarginalMeasure m(grid, std::move(w));
      return PairMeasure::product(m, m);
    };
    fam.limit_measure = PairMeasure::product(leb, leb);
  }
  return fam;
}

std::vector<std::string> family_ids() {
  std::vector<std::string> ids;
  for (const auto& f : kFamilies) ids.emplace_back(f.id);
  return ids;
}

Fixture example_fixture(std::string_view id, const GridPtr& grid, const FamilyParams& params) {
  for (const auto& m : kMeasures) {
    if (id != m.id) continue;
    Fixture fx{m.id, m.description, std::nullopt, std::nullopt};
    if (id == "dirac") {
      fx.measure = dirac(grid, params.center);
    } else {
      const Vector w = loglog_marginal(*grid);
      const MarginalMeasure mm(grid, w);
      fx.measure = PairMeasure::product(mm, mm);
    }
    return fx;
  }
  static constexpr const char* kFixtureFamilies[] = {"mollified_dirac", "oscillating_density",
                                                     "product_sequence"};
  for (const char* f : kFixtureFamilies) {
    if (id != f) continue;
    SequenceFamily fam = make_family(id, grid, params);
    return Fixture{fam.id, fam.description, std::nullopt, std::move(fam)};
  }
  throw std::invalid_argument("unknown fixture '" + std::string(id) + "'");
}

std::vector<std::pair<std::string, std::string>> list_fixtures() {
  std::vector<std::pair<std::string, std::string>> out;
  for (const auto& f : kFamilies) out.emplace_back(f.id, f.description);
  for (const auto& f : kMeasures) out.emplace_back(f.id, f.description);
  std::sort(out.begin(), out.end());
  return out;
}

double loglog_m(double x) noexcept {
  const double a = std::abs(x);
  const double l1 = std::log(a);
  const double l2 = std::log(std::abs(l1));
  const double l3 = std::log(std::abs(l2));
  return 1.0 / (a * l1 * l2 * l3 * l3);
}

double loglog_w(double x, double y) noexcept {
  const double r = std::sqrt(x * x + y * y);
  if (!(r < 1.0 / std::numbers::e)) return 0.0;
  return std::abs(std::log(std::abs(std::log(r))));
}

std::vector<LoglogRefinementRow> loglog_refinement(const std::vector<int>& sizes) {
  std::vector<LoglogRefinementRow> rows;
  for (int n : sizes) {
    if (n % 2 != 0)
      throw std::invalid_argument("loglog_refinement: n must be even so no node sits at the singularity");
    const GridPtr g = make_grid(1, n);
    const Vector m = loglog_marginal(*g);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      if (m[i] == 0.0) continue;
      const double xi = 2.0 * g->nodes()[static_cast<std::size_t>(i)][0] - 1.0;
      for (int j = 0; j < n; ++j) {
        if (m[j] == 0.0) continue;
        const double eta = 2.0 * g->nodes()[static_cast<std::size_t>(j)][0] - 1.0;
        total += m[i] * m[j] * loglog_w(xi, eta);
      }
    }
    rows.push_back({n, m.sum() * m.sum(), total});
  }
  return rows;
}

}  // namespace nlab
