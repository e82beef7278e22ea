#include "nlab/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace nlab {
namespace {

[[noreturn]] void throw_local_non_finite(const Point& x, double xi) {
  std::ostringstream os;
  os << "local integrand is not finite at x = (" << x[0] << ", " << x[1] << "), xi = " << xi;
  throw std::domain_error(os.str());
}

double edge_gradient(const Grid& g, const Vector& u, const Edge& e) {
  const double head = e.head == kBoundary ? 0.0 : u[e.head];
  const double tail = e.tail == kBoundary ? 0.0 : u[e.tail];
  return (head - tail) / g.h();
}

void check_finite_pair(double v, double s, double t) {
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "pair integrand derivative is not finite at (s, t) = (" << s << ", " << t << ")";
    throw NonFiniteError(os.str(), s, t);
  }
}

// Adds sum_j w_ij d1f(u_i, v_j) to out_i for a dense row-major weight matrix.
void add_row_partials(const PairIntegrand& f, const DenseMatrix& w, const Vector& u,
                      Vector& out) {
  const Eigen::Index n = u.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    double acc = 0.0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const double wij = w(i, j);
      if (wij == 0.0) continue;
      const double d = f.partial1(u[i], u[j]);
      check_finite_pair(d, u[i], u[j]);
      acc += wij * d;
    }
    out[i] += acc;
  }
}

void add_col_partials(const PairIntegrand& f, const DenseMatrix& w, const Vector& u,
                      Vector& out) {
  const Eigen::Index n = u.size();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double wji = w(j, i);
      if (wji == 0.0) continue;
      const double d = f.partial2(u[j], u[i]);
      check_finite_pair(d, u[j], u[i]);
      out[i] += wji * d;
    }
  }
}

}  // namespace

double eval_F(const PairMeasure& mu, const PairIntegrand& f, const GridFunction& u) {
  if (mu.is_signed())
    throw std::invalid_argument("eval_F: energies require a nonnegative measure");
  return double_integral(mu, f, u, u);
}

double eval_G(const LocalIntegrand& g, const GridFunction& u) {
  const Grid& grid = u.grid();
  const double hd = grid.cell_weight();
  double s = 0.0;
  for (const Edge& e : grid.edges()) {
    const double xi = edge_gradient(grid, u.values(), e);
    const double v = g(e.midpoint, e.axis, xi);
    if (!std::isfinite(v)) throw_local_non_finite(e.midpoint, xi);
    s += v;
  }
  return hd * s;
}

double eval_energy(const Energy& e, const GridFunction& u) {
  double v = eval_F(e.mu, e.f, u) + eval_G(e.g, u);
  if (e.forcing) {
    require_same_grid(u.grid(), e.forcing->grid(), "eval_energy");
    v -= u.values().dot(e.forcing->values().cwiseProduct(u.grid().quadrature_weights()));
  }
  return v;
}

TruncationReport check_truncation_condition(const PairIntegrand& f, double a, double b,
                                            const std::vector<double>& lambdas,
                                            const SampleBox& box, long trials,
                                            std::uint64_t seed) {
  if (lambdas.empty()) throw std::invalid_argument("check_truncation_condition: empty lambda set");
  if (trials < 1) throw std::invalid_argument("check_truncation_condition: trials must be >= 1");
  if (!(box.hi > box.lo)) throw std::invalid_argument("check_truncation_condition: empty box");
  for (double l : lambdas)
    if (!(l > 0.0)) throw std::invalid_argument("check_truncation_condition: lambda must be > 0");

  TruncationReport rep;
  rep.worst_violation = -std::numeric_limits<double>::infinity();
  auto probe = [&](double s, double t, double lambda) {
    ++rep.samples;
    const double lhs = f(truncate(s, lambda), truncate(t, lambda));
    const double rhs = a * f(s, t) + b;
    const double v = lhs - rhs;
    if (v > rep.worst_violation) {
      rep.worst_violation = v;
      rep.witness_s = s;
      rep.witness_t = t;
      rep.witness_lambda = lambda;
    }
    if (!(v <= 1e-12 * (1.0 + std::abs(rhs)))) rep.pass = false;
  };

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ud(box.lo, box.hi);
  for (double lambda : lambdas) {
    std::vector<double> pts;
    const int lattice = 41;
    for (int i = 0; i < lattice; ++i) pts.push_back(box.lo + (box.hi - box.lo) * i / (lattice - 1));
    for (double c : {0.0, lambda, -lambda, 0.5 * lambda, -0.5 * lambda})
      if (c >= box.lo && c <= box.hi) pts.push_back(c);
    for (double s : pts)
      for (double t : pts) probe(s, t, lambda);
    for (long k = 0; k < trials; ++k) probe(ud(rng), ud(rng), lambda);
  }
  return rep;
}

GrowthReport check_growth(const LocalIntegrand& g, double c0, double c1,
                          const std::function<double(const Point&)>& a, long sample_count,
                          std::uint64_t seed, int dim) {
  if (sample_count < 1) throw std::invalid_argument("check_growth: sample_count must be >= 1");
  if (dim != 1 && dim != 2) throw std::invalid_argument("check_growth: dim must be 1 or 2");
  GrowthReport rep;
  rep.lower_margin = std::numeric_limits<double>::infinity();
  rep.upper_margin = std::numeric_limits<double>::infinity();
  double worst = std::numeric_limits<double>::infinity();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 1.0);
  std::uniform_real_distribution<double> uxi(-10.0, 10.0);
  std::uniform_int_distribution<int> uaxis(0, dim - 1);
  auto probe = [&](const Point& x, int axis, double xi) {
    ++rep.samples;
    const double gv = g(x, axis, xi);
    const double pw = std::pow(std::abs(xi), g.p);
    const double lo = gv - c0 * pw;
    const double hi = c1 * pw + (a ? a(x) : 0.0) - gv;
    rep.lower_margin = std::min(rep.lower_margin, lo);
    rep.upper_margin = std::min(rep.upper_margin, hi);
    const double tol = 1e-12 * (1.0 + std::abs(gv));
    if (!(lo >= -tol) || !(hi >= -tol)) rep.pass = false;
    if (std::min(lo, hi) < worst) {
      worst = std::min(lo, hi);
      rep.witness_x = x;
      rep.witness_xi = xi;
    }
  };
  for (long k = 0; k < sample_count; ++k) {
    const Point x{ux(rng), dim == 2 ? ux(rng) : 0.0};
    const int axis = uaxis(rng);
    probe(x, axis, 0.0);
    probe(x, axis, uxi(rng));
  }
  return rep;
}

GridFunction grad_energy(const Energy& e, const GridFunction& u) {
  const Grid& grid = u.grid();
  require_same_grid(e.mu.grid(), grid, "grad_energy");
  if (e.mu.is_signed()) throw std::invalid_argument("grad_energy: energies require a nonnegative measure");
  const Vector& uu = u.values();
  const Eigen::Index n = uu.size();
  Vector out = Vector::Zero(n);
  const PairIntegrand& f = e.f;

  if (const auto& w = e.mu.density()) {
    if (f.kernel == PairKernel::squared_difference) {
      const Vector rows = w->rowwise().sum();
      const Vector cols = w->colwise().sum().transpose();
      out += 2.0 * (uu.cwiseProduct(rows + cols) - (*w) * uu - w->transpose() * uu);
    } else if (f.kernel == PairKernel::product) {
      out += (*w) * uu + w->transpose() * uu;
    } else {
      add_row_partials(f, *w, uu, out);
      add_col_partials(f, *w, uu, out);
    }
  }
  for (const Atom& at : e.mu.atom_list()) {
    const Stencil sx = interpolation_stencil(grid, at.x);
    const Stencil sy = interpolation_stencil(grid, at.y);
    const double s = u.interpolate(at.x);
    const double t = u.interpolate(at.y);
    const double d1 = f.partial1(s, t);
    const double d2 = f.partial2(s, t);
    check_finite_pair(d1, s, t);
    check_finite_pair(d2, s, t);
    for (int k = 0; k < sx.size; ++k) out[sx.node[k]] += at.mass * d1 * sx.weight[k];
    for (int k = 0; k < sy.size; ++k) out[sy.node[k]] += at.mass * d2 * sy.weight[k];
  }
  for (const ProductTerm& t : e.mu.products()) {
    const Vector& m1 = t.first;
    const Vector& m2 = t.second;
    if (f.kernel == PairKernel::squared_difference) {
      const double a1 = m1.dot(uu);
      const double a2 = m2.dot(uu);
      out += t.coefficient * 2.0 *
             (uu.cwiseProduct(m2.sum() * m1 + m1.sum() * m2) - a2 * m1 - a1 * m2);
    } else if (f.kernel == PairKernel::product) {
      out += t.coefficient * (m2.dot(uu) * m1 + m1.dot(uu) * m2);
    } else {
      const DenseMatrix w = t.coefficient * m1 * m2.transpose();
      add_row_partials(f, w, uu, out);
      add_col_partials(f, w, uu, out);
    }
  }

  const double hd = grid.cell_weight();
  const double inv_h = 1.0 / grid.h();
  for (const Edge& ed : grid.edges()) {
    const double xi = edge_gradient(grid, uu, ed);
    const double d = e.g.derivative(ed.midpoint, ed.axis, xi);
    if (!std::isfinite(d)) throw_local_non_finite(ed.midpoint, xi);
    const double flux = hd * d * inv_h;
    if (ed.head != kBoundary) out[ed.head] += flux;
    if (ed.tail != kBoundary) out[ed.tail] -= flux;
  }

  if (e.forcing) {
    require_same_grid(grid, e.forcing->grid(), "grad_energy");
    out -= e.forcing->values().cwiseProduct(grid.quadrature_weights());
  }
  return GridFunction(u.grid_ptr(), std::move(out));
}

}  // namespace nlab
