#pragma once
// Energies F(u) = int int f(u(x), u(y)) dmu and G(u) = int g(x, grad u), their
// structural checks, gradients, and minimization of F + G - <forcing, u>.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "nlab/integrands.hpp"
#include "nlab/measures.hpp"
#include "nlab/sobolev.hpp"

namespace nlab {

struct Energy {
  PairMeasure mu;  // nonnegative
  PairIntegrand f;
  LocalIntegrand g;
  // Nodal density h; adds -sum_i q_i h_i u_i with the quadrature weights q.
  std::optional<GridFunction> forcing;
};

// Throws std::invalid_argument for a signed measure.
double eval_F(const PairMeasure& mu, const PairIntegrand& f, const GridFunction& u);
// sum_e h^d g(x_e, axis_e, grad_e u)
double eval_G(const LocalIntegrand& g, const GridFunction& u);
double eval_energy(const Energy& e, const GridFunction& u);

struct TruncationReport {
  bool pass = true;
  // max of f(tau s, tau t) - a f(s,t) - b; negative means slack everywhere
  double worst_violation = 0.0;
  double witness_s = 0.0;
  double witness_t = 0.0;
  double witness_lambda = 0.0;
  long samples = 0;
};

struct SampleBox {
  double lo = -4.0;
  double hi = 4.0;
};

// Scans a lattice over the box (including the diagonal s = t and the
// truncation kinks +-lambda) plus `trials` seeded random points, for every
// lambda, checking f(tau(s), tau(t)) <= a f(s,t) + b up to 1e-12 relative.
TruncationReport check_truncation_condition(const PairIntegrand& f, double a, double b,
                                            const std::vector<double>& lambdas,
                                            const SampleBox& box, long trials,
                                            std::uint64_t seed = 0);

struct GrowthReport {
  bool pass = true;
  double lower_margin = 0.0;  // min of g - c0|xi|^p
  double upper_margin = 0.0;  // min of c1|xi|^p + a(x) - g
  Point witness_x{};  // sample with the most negative margin
  double witness_xi = 0.0;
  long samples = 0;
};

// c0 |xi|^p <= g(x, xi) <= c1 |xi|^p + a(x) on xi = 0 for every sampled x
// plus seeded random (x, xi) with |xi| <= 10.
GrowthReport check_growth(const LocalIntegrand& g, double c0, double c1,
                          const std::function<double(const Point&)>& a, long sample_count,
                          std::uint64_t seed, int dim = 1);

// Nodal gradient of F + G - forcing. F-part at node i:
// sum_j w_ij d1f(u_i,u_j) + w_ji d2f(u_j,u_i); G-part: discrete divergence of
// d_xi g over incident edges. Partials fall back to central differences.
GridFunction grad_energy(const Energy& e, const GridFunction& u);

struct MinimizeOptions {
  int restarts = 4;
  std::uint64_t seed = 0;
  int max_iter = 20000;
  // Stationarity: the gradient in the K^{-1} dual norm or, with a box, the
  // ||.||_{1,2} length of the projected preconditioned step.
  double tolerance = 1e-7;
  std::optional<double> box;  // project onto |u| <= box after every step
  const GridFunction* initial = nullptr;  // replaces the zero start of restart 0
};

struct MinimizeDiagnostics {
  int restarts_run = 0;
  int best_restart = 0;
  int iterations = 0;  // of the best restart
  double stationarity = 0.0;
  bool converged = false;
  bool hit_cap = false;
  bool trivial = false;  // returned u = 0 without iterating
  std::vector<double> restart_values;
};

struct MinimizeResult {
  GridFunction u;
  double value;
  MinimizeDiagnostics diagnostics;
};

// Multi-start projected gradient descent, preconditioned by the weighted
// stiffness matrix of g, with Armijo backtracking (constant 1e-4, shrink 0.5).
// Restart 0 starts from zero (or opts.initial), later restarts from seeded
// random sine series. Deterministic given the seed.
MinimizeResult minimize_energy(const Energy& e, const MinimizeOptions& opts = {});

}  // namespace nlab
