#pragma once
// Damped Newton solver for the discrete p-Dirichlet problem
//
//   minimize  J(u) = (1/p) sum_e h^d |grad_e u|^p - <load, u>
//
// over the free nodes, with the remaining nodes held at prescribed values.
// J is convex, so Armijo backtracking along the Newton direction converges
// globally; near the solution the iteration is quadratic for p >= 2.

#include <vector>

#include "nlab/sobolev.hpp"

namespace nlab::detail {

struct PDirichletProblem {
  double p = 2.0;
  Vector load;                 // one entry per node; entries on fixed nodes ignored
  std::vector<char> fixed;     // empty means no fixed nodes
  Vector fixed_values;         // read only where fixed[i] != 0
};

struct PDirichletResult {
  Vector u;
  SolverStatus status;
};

PDirichletResult solve_p_dirichlet(const Grid& grid, const PDirichletProblem& problem,
                                   const Vector& initial, double tolerance, int max_iterations);

}  // namespace nlab::detail
