#pragma once
// Discrete W^{1,p}_0 machinery: gradients, the ||.||_{1,p} norm, truncation,
// the dual norm ||.||_{-1,q} of nodal functionals, and p-capacity.

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/SparseCore>

#include "nlab/grid.hpp"

namespace nlab {

using SparseMatrix = Eigen::SparseMatrix<double>;

// Throws std::invalid_argument unless 1 < p < inf.
void validate_p(double p, const char* what);

// p in (1, 1.1] or p >= 10: accepted, but reports flag the run.
bool p_ill_conditioned(double p) noexcept;

// Outcome of an iterative solve. Hitting the iteration cap is never silent:
// callers surface hit_cap in their own reports.
struct SolverStatus {
  int iterations = 0;
  double residual = 0.0;
  bool converged = true;
  bool hit_cap = false;
};

inline constexpr double kSolverTolerance = 1e-8;
inline constexpr int kSolverMaxIterations = 100000;

EdgeField gradient(const GridFunction& u);

// (sum_e h^dim |grad_e u|^p)^(1/p)
double sobolev_norm(const GridFunction& u, double p);
double sobolev_norm(const Grid& grid, const Vector& values, double p);

// Clamp to [-lambda, lambda]
inline double truncate(double s, double lambda) noexcept {
  return s < -lambda ? -lambda : (s > lambda ? lambda : s);
}
GridFunction truncate(const GridFunction& u, double lambda);

// Matrix of the p = 2 quadratic form: ||u||_{1,2}^2 = u^T K u.
SparseMatrix stiffness_matrix(const Grid& grid);

// Cached sparse Cholesky of the stiffness matrix.
class StiffnessSolver {
 public:
  explicit StiffnessSolver(GridPtr grid);
  ~StiffnessSolver();
  StiffnessSolver(StiffnessSolver&&) noexcept;
  StiffnessSolver& operator=(StiffnessSolver&&) noexcept;

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  Vector solve(const Vector& rhs) const;
  const SparseMatrix& matrix() const noexcept { return k_; }

 private:
  struct Impl;
  GridPtr grid_;
  SparseMatrix k_;
  std::unique_ptr<Impl> impl_;
};

enum class DualNormMethod { automatic, closed_form, iterative };

struct DualNormOptions {
  DualNormMethod method = DualNormMethod::automatic;
  double tolerance = kSolverTolerance;
  int max_iterations = kSolverMaxIterations;
  // Initial iterate for the iterative route; any positive multiple works.
  const Vector* warm_start = nullptr;
};

struct DualNormResult {
  double value;
  GridFunction maximizer;  // unit ||.||_{1,p} norm unless the functional is zero
  SolverStatus status;
};

// sup { <l, phi> : ||phi||_{1,p} <= 1 } for the nodal functional
// <l, phi> = sum_i l_i phi_i. Use functional_from_density() to turn a nodal
// density c into l_i = c_i w_i with the grid quadrature weights.
//
// p = 2 closed form: phi = K^{-1} l normalized. Any p, iterative: damped Newton
// on the convex potential (1/p)||phi||^p - <l, phi>, whose minimizer is a
// positive multiple of the maximizer.
DualNormResult dual_norm(const GridPtr& grid, const Vector& functional, double p,
                         const DualNormOptions& opts = {});
// Same as above, reusing a p = 2 factorization.
DualNormResult dual_norm(const StiffnessSolver& k, const Vector& functional);

Vector functional_from_density(const Grid& grid, const Vector& density);

struct CapacityResult {
  double value;
  GridFunction minimizer;
  SolverStatus status;
};

// inf { ||u||_{1,p}^p : u >= 1 on A } over grid functions. The minimizer
// equals 1 on A (truncation at 1 never increases the norm) and is
// p-harmonic on the remaining nodes.
CapacityResult capacity(const GridPtr& grid, std::span<const int> nodes, double p);

enum class SequenceKind { oscillation, concentration, stationary };

// Weakly (not strongly) convergent test sequences around `base`:
//   oscillation:   base + (1/k) prod_a sin(k pi x_a)
//   concentration: base + bump of width 1/k at the domain centre, scaled to
//                  unit ||.||_{1,p} norm
//   stationary:    base
// Requires n + 1 >= 8k so the profile is resolved.
GridFunction weak_test_sequence(SequenceKind kind, int k, const GridFunction& base,
                                double p = 2.0);

}  // namespace nlab
