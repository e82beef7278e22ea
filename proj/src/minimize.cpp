#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

#include <Eigen/SparseCholesky>

#include "nlab/functionals.hpp"
#include "nlab/parallel.hpp"

namespace nlab {
namespace {

using Cholesky = Eigen::SimplicialLLT<SparseMatrix>;

// D^T diag(h^d c_e / h^2) D with c_e = g(x_e, axis_e, 1), the stiffness of
// the local term's coefficient field.
SparseMatrix weighted_stiffness(const Grid& grid, const LocalIntegrand& g) {
  const double base = grid.cell_weight() / (grid.h() * grid.h());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(grid.edges().size() * 4);
  for (const Edge& e : grid.edges()) {
    double c = g(e.midpoint, e.axis, 1.0);
    if (!(c > 1e-12) || !std::isfinite(c)) c = 1.0;
    c *= base;
    if (e.head != kBoundary) trip.emplace_back(e.head, e.head, c);
    if (e.tail != kBoundary) trip.emplace_back(e.tail, e.tail, c);
    if (e.head != kBoundary && e.tail != kBoundary) {
      trip.emplace_back(e.head, e.tail, -c);
      trip.emplace_back(e.tail, e.head, -c);
    }
  }
  SparseMatrix m(grid.num_nodes(), grid.num_nodes());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

bool trivially_minimized_by_zero(const Energy& e) {
  if (e.forcing) return false;
  if (!e.f.nonnegative || e.f(0.0, 0.0) != 0.0) return false;
  if (!(e.g.c0 >= 0.0)) return false;
  for (const Edge& ed : e.mu.grid().edges())
    if (e.g(ed.midpoint, ed.axis, 0.0) != 0.0) return false;
  return true;
}

Vector random_start(const Grid& g, std::uint64_t seed, int restart) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(restart)};
  std::mt19937_64 rng(seq);
  std::normal_distribution<double> nd;
  const double pi = std::numbers::pi;
  const int modes = std::min(g.n(), 6);
  Vector v = Vector::Zero(g.num_nodes());
  for (int m1 = 1; m1 <= modes; ++m1) {
    for (int m2 = 1; m2 <= (g.dim() == 2 ? modes : 1); ++m2) {
      const double a = nd(rng) / (m1 * m1 * m2 * m2);
      for (int i = 0; i < g.num_nodes(); ++i) {
        const Point& x = g.nodes()[static_cast<std::size_t>(i)];
        double s = std::sin(m1 * pi * x[0]);
        if (g.dim() == 2) s *= std::sin(m2 * pi * x[1]);
        v[i] += a * s;
      }
    }
  }
  const double mx = v.cwiseAbs().maxCoeff();
  if (mx > 0.0) v *= 0.25 / mx;
  return v;
}

struct Run {
  Vector u;
  double value = 0.0;
  int iterations = 0;
  double stationarity = 0.0;
  bool converged = false;
  bool hit_cap = false;
};

Run descend(const Energy& e, const Cholesky& precond, const SparseMatrix& k,
            const Cholesky& stiff, Vector u, const MinimizeOptions& opts) {
  const GridPtr& gp = e.mu.grid_ptr();
  auto project = [&](Vector& v) {
    if (opts.box) v = v.cwiseMax(-*opts.box).cwiseMin(*opts.box);
  };
  project(u);
  Run run;
  double energy = eval_energy(e, GridFunction(gp, u));
  for (int it = 0;; ++it) {
    run.iterations = it;
    const Vector r = grad_energy(e, GridFunction(gp, u)).values();
    const Vector dir = -precond.solve(r);
    if (opts.box) {
      Vector probe = u + dir;
      project(probe);
      const Vector step = probe - u;
      run.stationarity = std::sqrt(std::max(0.0, step.dot(k * step)));
    } else {
      run.stationarity = std::sqrt(std::max(0.0, r.dot(stiff.solve(r))));
    }
    if (run.stationarity <= opts.tolerance) {
      run.converged = true;
      break;
    }
    if (it >= opts.max_iter) {
      run.hit_cap = true;
      break;
    }
    double t = 1.0;
    bool accepted = false;
    Vector trial;
    double trial_energy = 0.0;
    const double slack = 1e-15 * std::abs(energy);
    for (int ls = 0; ls < 60; ++ls) {
      trial = u + t * dir;
      project(trial);
      trial_energy = eval_energy(e, GridFunction(gp, trial));
      if (std::isfinite(trial_energy) &&
          trial_energy <= energy + 1e-4 * r.dot(trial - u) + slack) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no representable decrease left
    u = std::move(trial);
    energy = trial_energy;
  }
  run.u = std::move(u);
  run.value = energy;
  return run;
}

}  // namespace

MinimizeResult minimize_energy(const Energy& e, const MinimizeOptions& opts) {
  if (opts.restarts < 1) throw std::invalid_argument("minimize_energy: restarts must be >= 1");
  if (opts.max_iter < 0) throw std::invalid_argument("minimize_energy: max_iter must be >= 0");
  if (opts.box && !(*opts.box > 0.0)) throw std::invalid_argument("minimize_energy: box must be > 0");
  if (e.mu.is_signed()) throw std::invalid_argument("minimize_energy: energies require a nonnegative measure");
  const GridPtr& gp = e.mu.grid_ptr();
  if (e.forcing) require_same_grid(*gp, e.forcing->grid(), "minimize_energy");

  MinimizeDiagnostics diag;
  if (trivially_minimized_by_zero(e)) {
    diag.trivial = true;
    diag.converged = true;
    return {GridFunction::zero(gp), 0.0, diag};
  }

  Cholesky precond(weighted_stiffness(*gp, e.g));
  const SparseMatrix k = stiffness_matrix(*gp);
  Cholesky stiff(k);
  if (precond.info() != Eigen::Success || stiff.info() != Eigen::Success)
    throw std::runtime_error("minimize_energy: factorization failed");

  std::vector<Run> runs(static_cast<std::size_t>(opts.restarts));
  parallel_for(runs.size(), [&](std::size_t r) {
    Vector start;
    if (r == 0)
      start = opts.initial ? opts.initial->values() : Vector::Zero(gp->num_nodes());
    else
      start = random_start(*gp, opts.seed, static_cast<int>(r));
    runs[r] = descend(e, precond, k, stiff, std::move(start), opts);
  });

  std::size_t best = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    diag.restart_values.push_back(runs[r].value);
    if (runs[r].value < runs[best].value) best = r;
  }
  diag.restarts_run = opts.restarts;
  diag.best_restart = static_cast<int>(best);
  diag.iterations = runs[best].iterations;
  diag.stationarity = runs[best].stationarity;
  diag.converged = runs[best].converged;
  diag.hit_cap = runs[best].hit_cap;
  return {GridFunction(gp, std::move(runs[best].u)), runs[best].value, diag};
}

}  // namespace nlab
