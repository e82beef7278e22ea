#pragma once
// Convergence experiments over scripted families: continuity and lower
// semicontinuity of the double integral, and convergence of minima of
// F_k + G_k - <forcing, u>.

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "nlab/fixtures.hpp"
#include "nlab/functionals.hpp"
#include "nlab/report.hpp"

namespace nlab {

using Forcing = std::function<double(const Point&)>;

// Default base function: prod_a x_a (1 - x_a).
GridFunction default_base(const GridPtr& grid);

// Cut-norm distance ||mu_k - mu||_box: exact at p = 2, alternating lower
// bound (4 restarts) otherwise.
double cut_distance(const PairMeasure& mu_k, const PairMeasure& mu, double p,
                    std::uint64_t seed = 0);

struct ContinuityOptions {
  double tolerance = 1e-3;  // |I_k - I_inf| at the largest k
  std::optional<GridFunction> base_u;
  std::optional<GridFunction> base_v;
  std::uint64_t seed = 0;
};

// I_k = int f(u_k(x), v_k(y)) dmu_k against I_inf = int f(u(x), v(y)) dmu.
// Verdicts: gap decreasing over the last three k, gap <= tolerance at the
// largest k. The fitted exponent is that of the integral gap.
ConvergenceReport continuity_experiment(const SequenceFamily& family, const PairIntegrand& f,
                                        SequenceKind u_kind, SequenceKind v_kind,
                                        const std::vector<int>& k_list,
                                        const ContinuityOptions& opts = {});

struct SemicontinuityOptions {
  double tolerance = 1e-4;
  std::optional<GridFunction> base;
  std::uint64_t seed = 0;
};

// Requires f >= 0. Verdict: min over the window k >= ceil(max k / 2) of I_k
// is >= I_inf - tolerance (a finite-window proxy for the liminf).
ConvergenceReport semicontinuity_experiment(const SequenceFamily& family, const PairIntegrand& f,
                                            SequenceKind u_kind, const std::vector<int>& k_list,
                                            const SemicontinuityOptions& opts = {});

struct GammaOptions {
  int restarts = 2;
  std::uint64_t seed = 0;
  int max_iter = 20000;
  double relative_tolerance = 0.02;  // |m_k - m_inf| / |m_inf| at the largest k
  double liminf_tolerance = 1e-4;
  std::optional<double> min_exponent;  // also assert the fitted exponent
  // Cross-check of m_inf against a direct minimization of the k = fine_k
  // energy on a 1D grid with fine_n nodes (0 disables).
  int fine_n = 0;
  int fine_k = 0;
  double fine_tolerance = 0.01;
};

// Minimizes F_k + G_k - forcing for each k and the limit energy. Rows: min_k,
// min_limit, relative gap as integral_gap, ||u_k* - u*||_{1,p} as
// minimizer_dist. Also checks the liminf inequality
// (F + G)(u*) <= min_{k in window} (F_k + G_k)(u_k) + tol along the computed
// minimizers and along oscillating sequences around u*.
ConvergenceReport gamma_experiment(const SequenceFamily& family, const PairIntegrand& f,
                                   const Forcing& forcing, const std::vector<int>& k_list,
                                   const GammaOptions& opts = {});

struct MoscoOptions {
  int restarts = 2;
  std::uint64_t seed = 0;
  int max_iter = 20000;
  double energy_tolerance = 0.02;  // recovery energy vs m_inf, relative
  double min_exponent = 1.0;       // decay of the strong W^{1,p} distance
};

// Recovery candidates u_k^rec = tau^lambda(u_k*) with lambda = 2 ||u*||_inf.
// Rows: min_k = E_k(u_k^rec), min_limit = m_inf, minimizer_dist =
// ||u_k^rec - u*||_{1,p}; extras hold the sup-norm distance and the energy
// of the truncated limit minimizer tau^lambda(u*) fed to E_k. Verdicts:
// recovery energy within tolerance at the largest k, and the strong distance
// decays with fitted exponent >= min_exponent.
ConvergenceReport mosco_check(const SequenceFamily& family, const PairIntegrand& f,
                              const Forcing& forcing, const std::vector<int>& k_list,
                              const MoscoOptions& opts = {});

}  // namespace nlab
