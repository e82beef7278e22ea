#include "nlab/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>
#include <string>

#include <Eigen/SparseCholesky>

#include "nlab/simd/kernels.hpp"
#include "p_dirichlet.hpp"

namespace nlab {

void validate_p(double p, const char* what) {
  if (!(p > 1.0) || !std::isfinite(p))
    throw std::invalid_argument(std::string(what) + ": exponent p must satisfy 1 < p < inf");
}

bool p_ill_conditioned(double p) noexcept { return p <= 1.1 || p >= 10.0; }

EdgeField gradient(const GridFunction& u) {
  const Grid& g = u.grid();
  Vector out(g.num_edges());
  const double inv_h = 1.0 / g.h();
  for (int e = 0; e < g.num_edges(); ++e) {
    const Edge& ed = g.edges()[static_cast<std::size_t>(e)];
    const double head = ed.head == kBoundary ? 0.0 : u[ed.head];
    const double tail = ed.tail == kBoundary ? 0.0 : u[ed.tail];
    out[e] = (head - tail) * inv_h;
  }
  return EdgeField(u.grid_ptr(), std::move(out));
}

double sobolev_norm(const Grid& grid, const Vector& values, double p) {
  validate_p(p, "sobolev_norm");
  const double inv_h = 1.0 / grid.h();
  Vector grad(grid.num_edges());
  for (int e = 0; e < grid.num_edges(); ++e) {
    const Edge& ed = grid.edges()[static_cast<std::size_t>(e)];
    const double head = ed.head == kBoundary ? 0.0 : values[ed.head];
    const double tail = ed.tail == kBoundary ? 0.0 : values[ed.tail];
    grad[e] = (head - tail) * inv_h;
  }
  double s = 0.0;
  if (p == 2.0) {
    s = simd::sum_squares({grad.data(), static_cast<std::size_t>(grad.size())});
    return std::sqrt(grid.cell_weight() * s);
  }
  // Scale out the largest entry so |g|^p cannot overflow for large p.
  const double gmax = grad.cwiseAbs().maxCoeff();
  if (gmax == 0.0) return 0.0;
  for (int e = 0; e < grad.size(); ++e) s += std::pow(std::abs(grad[e]) / gmax, p);
  return gmax * std::pow(grid.cell_weight() * s, 1.0 / p);
}

double sobolev_norm(const GridFunction& u, double p) {
  return sobolev_norm(u.grid(), u.values(), p);
}

GridFunction truncate(const GridFunction& u, double lambda) {
  if (!(lambda > 0.0)) throw std::invalid_argument("truncate: lambda must be > 0");
  Vector v = u.values().unaryExpr([lambda](double s) { return truncate(s, lambda); });
  return GridFunction(u.grid_ptr(), std::move(v));
}

SparseMatrix stiffness_matrix(const Grid& grid) {
  const double c = grid.cell_weight() / (grid.h() * grid.h());
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(grid.edges().size() * 4);
  for (const Edge& e : grid.edges()) {
    if (e.head != kBoundary) trip.emplace_back(e.head, e.head, c);
    if (e.tail != kBoundary) trip.emplace_back(e.tail, e.tail, c);
    if (e.head != kBoundary && e.tail != kBoundary) {
      trip.emplace_back(e.head, e.tail, -c);
      trip.emplace_back(e.tail, e.head, -c);
    }
  }
  SparseMatrix k(grid.num_nodes(), grid.num_nodes());
  k.setFromTriplets(trip.begin(), trip.end());
  return k;
}

struct StiffnessSolver::Impl {
  Eigen::SimplicialLLT<SparseMatrix> llt;
};

StiffnessSolver::StiffnessSolver(GridPtr grid)
    : grid_(std::move(grid)), k_(stiffness_matrix(*grid_)), impl_(std::make_unique<Impl>()) {
  impl_->llt.compute(k_);
  if (impl_->llt.info() != Eigen::Success)
    throw std::runtime_error("StiffnessSolver: factorization failed");
}

StiffnessSolver::~StiffnessSolver() = default;
StiffnessSolver::StiffnessSolver(StiffnessSolver&&) noexcept = default;
StiffnessSolver& StiffnessSolver::operator=(StiffnessSolver&&) noexcept = default;

Vector StiffnessSolver::solve(const Vector& rhs) const { return impl_->llt.solve(rhs); }

Vector functional_from_density(const Grid& grid, const Vector& density) {
  if (density.size() != grid.num_nodes())
    throw std::invalid_argument("functional_from_density: size mismatch");
  return density.cwiseProduct(grid.quadrature_weights());
}

namespace {

DualNormResult normalized(const GridPtr& grid, const Vector& functional, Vector phi, double p,
                          SolverStatus status) {
  const double nrm = sobolev_norm(*grid, phi, p);
  if (nrm == 0.0) return {0.0, GridFunction::zero(grid), status};
  phi /= nrm;
  const double value = functional.dot(phi);
  return {value, GridFunction(grid, std::move(phi)), status};
}

}  // namespace

DualNormResult dual_norm(const StiffnessSolver& k, const Vector& functional) {
  const GridPtr& grid = k.grid_ptr();
  if (functional.size() != grid->num_nodes())
    throw std::invalid_argument("dual_norm: functional size mismatch");
  if (!functional.allFinite()) throw std::invalid_argument("dual_norm: non-finite functional");
  if (functional.isZero(0.0)) return {0.0, GridFunction::zero(grid), {}};
  return normalized(grid, functional, k.solve(functional), 2.0, {});
}

DualNormResult dual_norm(const GridPtr& grid, const Vector& functional, double p,
                         const DualNormOptions& opts) {
  validate_p(p, "dual_norm");
  if (functional.size() != grid->num_nodes())
    throw std::invalid_argument("dual_norm: functional size mismatch");
  if (!functional.allFinite()) throw std::invalid_argument("dual_norm: non-finite functional");
  if (functional.isZero(0.0)) return {0.0, GridFunction::zero(grid), {}};

  DualNormMethod method = opts.method;
  if (method == DualNormMethod::automatic)
    method = p == 2.0 ? DualNormMethod::closed_form : DualNormMethod::iterative;
  if (method == DualNormMethod::closed_form) {
    if (p != 2.0) throw std::invalid_argument("dual_norm: closed form requires p = 2");
    return dual_norm(StiffnessSolver(grid), functional);
  }

  // Start on the ray of the warm start (or of the p = 2 solution), at the
  // point minimizing the potential along that ray.
  Vector start;
  if (opts.warm_start != nullptr && opts.warm_start->size() == functional.size() &&
      functional.dot(*opts.warm_start) > 0.0) {
    start = *opts.warm_start;
  } else {
    const SparseMatrix k = stiffness_matrix(*grid);
    Eigen::SimplicialLLT<SparseMatrix> llt(k);
    start = llt.solve(functional);
  }
  const double s = std::pow(sobolev_norm(*grid, start, p), p);
  const double b = functional.dot(start);
  if (s > 0.0 && b > 0.0) start *= std::pow(b / s, 1.0 / (p - 1.0));

  detail::PDirichletProblem pb{p, functional, {}, {}};
  auto res = detail::solve_p_dirichlet(*grid, pb, start, opts.tolerance, opts.max_iterations);
  return normalized(grid, functional, std::move(res.u), p, res.status);
}

CapacityResult capacity(const GridPtr& grid, std::span<const int> nodes, double p) {
  validate_p(p, "capacity");
  if (nodes.empty()) throw std::invalid_argument("capacity: node set is empty");
  const int n = grid->num_nodes();
  std::vector<char> fixed(static_cast<std::size_t>(n), 0);
  for (int i : nodes) {
    if (i < 0 || i >= n)
      throw std::invalid_argument("capacity: node " + std::to_string(i) + " is not on the grid");
    fixed[static_cast<std::size_t>(i)] = 1;
  }
  Vector fixed_values = Vector::Ones(n);

  // p = 2: the constrained minimizer solves K_ff u_f = -K_fA 1.
  const SparseMatrix k = stiffness_matrix(*grid);
  std::vector<int> free_nodes;
  std::vector<int> free_index(static_cast<std::size_t>(n), -1);
  for (int i = 0; i < n; ++i) {
    if (!fixed[static_cast<std::size_t>(i)]) {
      free_index[static_cast<std::size_t>(i)] = static_cast<int>(free_nodes.size());
      free_nodes.push_back(i);
    }
  }
  Vector u = Vector::Ones(n);
  if (!free_nodes.empty()) {
    const int nf = static_cast<int>(free_nodes.size());
    std::vector<Eigen::Triplet<double>> trip;
    Vector rhs = Vector::Zero(nf);
    for (int col = 0; col < k.outerSize(); ++col) {
      for (SparseMatrix::InnerIterator it(k, col); it; ++it) {
        const int r = free_index[static_cast<std::size_t>(it.row())];
        if (r < 0) continue;
        const int c = free_index[static_cast<std::size_t>(it.col())];
        if (c >= 0)
          trip.emplace_back(r, c, it.value());
        else
          rhs[r] -= it.value();
      }
    }
    SparseMatrix kff(nf, nf);
    kff.setFromTriplets(trip.begin(), trip.end());
    Eigen::SimplicialLLT<SparseMatrix> llt(kff);
    const Vector uf = llt.solve(rhs);
    for (int j = 0; j < nf; ++j) u[free_nodes[static_cast<std::size_t>(j)]] = uf[j];
  }

  SolverStatus status;
  if (p != 2.0 && !free_nodes.empty()) {
    detail::PDirichletProblem pb{p, Vector::Zero(n), fixed, fixed_values};
    auto res = detail::solve_p_dirichlet(*grid, pb, u, kSolverTolerance, kSolverMaxIterations);
    u = std::move(res.u);
    status = res.status;
  }
  const double nrm = sobolev_norm(*grid, u, p);
  return {std::pow(nrm, p), GridFunction(grid, std::move(u)), status};
}

GridFunction weak_test_sequence(SequenceKind kind, int k, const GridFunction& base, double p) {
  if (k < 1) throw std::invalid_argument("weak_test_sequence: k must be >= 1");
  const Grid& g = base.grid();
  if (g.n() + 1 < 8 * k)
    throw std::invalid_argument("weak_test_sequence: k=" + std::to_string(k) +
                                " is under-resolved (need n+1 >= 8k)");
  validate_p(p, "weak_test_sequence");
  const double pi = std::numbers::pi;
  switch (kind) {
    case SequenceKind::stationary:
      return base;
    case SequenceKind::oscillation: {
      auto prof = GridFunction::sample(base.grid_ptr(), [&](const Point& x) {
        double v = std::sin(k * pi * x[0]) / k;
        if (g.dim() == 2) v *= std::sin(k * pi * x[1]);
        return v;
      });
      return base + prof;
    }
    case SequenceKind::concentration: {
      const double half = 0.5 / k;
      auto tent = [half](double c) { return std::max(0.0, half - std::abs(c - 0.5)); };
      auto bump = GridFunction::sample(base.grid_ptr(), [&](const Point& x) {
        double v = tent(x[0]);
        if (g.dim() == 2) v *= tent(x[1]);
        return v;
      });
      const double nrm = sobolev_norm(bump, p);
      return base + bump * (1.0 / nrm);
    }
  }
  throw std::invalid_argument("weak_test_sequence: unknown kind");
}

}  // namespace nlab
