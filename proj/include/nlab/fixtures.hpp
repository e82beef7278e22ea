#pragma once
// Scripted measure/integrand sequences and named example measures.

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "nlab/integrands.hpp"
#include "nlab/measures.hpp"

namespace nlab {

struct FamilyParams {
  double p = 2.0;
  double alpha = 1.0;  // two-phase coefficients
  double beta = 4.0;
  Point center{0.5, 0.5};  // mollified_dirac location (x0 in both variables)
};

// k -> (mu_k, g_k) with limit (mu, g), all on one grid. Ids:
//   constant                    mu_k = Lebesgue, g_k = |xi|^p
//   oscillating_density         rho_k = 1 + S_k(x) S_k(y), S_k = prod_a sin(k pi x_a)
//   homogenization              mu_k = Lebesgue, g_k = a(k x)|xi|^p (two-phase)
//   homogenization_oscillating  rho_k as in oscillating_density, g_k two-phase
//   mollified_dirac             normalized tent of width 1/k around (x0, x0)
//   product_sequence            m_k (x) m_k with m_k = (1 + sin(2 k pi x_1)) dx
// Homogenization limits use the effective coefficient
// (<a^{-1/(p-1)}>)^{-(p-1)}, the harmonic mean at p = 2; 1D only.
struct SequenceFamily {
  std::string id;
  std::string description;
  GridPtr grid;
  FamilyParams params;
  std::function<PairMeasure(int)> measure;
  std::function<LocalIntegrand(int)> local;
  PairMeasure limit_measure;
  LocalIntegrand limit_local;
};

SequenceFamily make_family(std::string_view id, const GridPtr& grid,
                           const FamilyParams& params = {});
std::vector<std::string> family_ids();

// Effective coefficient of the 1D two-phase p-energy.
double homogenized_coefficient(double alpha, double beta, double p);

// Named fixtures: dirac and loglog_density are single measures, the rest are
// families (see make_family).
struct Fixture {
  std::string id;
  std::string description;
  std::optional<PairMeasure> measure;
  std::optional<SequenceFamily> family;
};

Fixture example_fixture(std::string_view id, const GridPtr& grid,
                        const FamilyParams& params = {});

// (id, description) for every fixture and family id, sorted by id.
std::vector<std::pair<std::string, std::string>> list_fixtures();

// The log-log density on (-1, 1):
//   m(x) = 1 / (|x| log|x| log|log|x|| log^2|log|log|x|||).
// It is negative for |x| < 1/e and has non-integrable singularities where
// the inner logarithms vanish; the fixture uses |m| on |xi| < kLoglogCutoff,
// where 1 / log(log(log(1/|xi|))) is an antiderivative of |m| in |xi|, so node
// masses are exact. Masses are pushed forward by xi -> (xi + 1) / 2.
double loglog_m(double x) noexcept;
inline constexpr double kLoglogCutoff = 0.011314286380459627;  // exp(-exp(1.5))

// w(x, y) = |log|log r|| for r = sqrt(x^2 + y^2) < 1/e, else 0, on (-1, 1)^2.
double loglog_w(double x, double y) noexcept;

// sum over node pairs of mu(i, j) w(xi_i, xi_j), with xi = 2x - 1, for the
// loglog_density fixture on 1D grids of each size in `sizes`. Grows without
// bound under refinement.
struct LoglogRefinementRow {
  int n;
  double mass;
  double w_integral;
};
std::vector<LoglogRefinementRow> loglog_refinement(const std::vector<int>& sizes);

}  // namespace nlab
