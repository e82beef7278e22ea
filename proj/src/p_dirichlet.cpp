#include "p_dirichlet.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCholesky>

namespace nlab::detail {
namespace {

struct Evaluation {
  double energy = 0.0;
  Vector grad_free;  // dJ/du on free nodes
  double scale = 0.0;
};

class Problem {
 public:
  Problem(const Grid& grid, const PDirichletProblem& pb) : grid_(grid), pb_(pb) {
    const int n = grid.num_nodes();
    free_index_.assign(static_cast<std::size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
      const bool fixed = !pb.fixed.empty() && pb.fixed[static_cast<std::size_t>(i)] != 0;
      if (!fixed) {
        free_index_[static_cast<std::size_t>(i)] = static_cast<int>(free_nodes_.size());
        free_nodes_.push_back(i);
      }
    }
  }

  int num_free() const { return static_cast<int>(free_nodes_.size()); }
  int free_index(int node) const {
    return node == kBoundary ? -1 : free_index_[static_cast<std::size_t>(node)];
  }
  const std::vector<int>& free_nodes() const { return free_nodes_; }

  double edge_gradient(const Vector& u, const Edge& e) const {
    const double head = e.head == kBoundary ? 0.0 : u[e.head];
    const double tail = e.tail == kBoundary ? 0.0 : u[e.tail];
    return (head - tail) / grid_.h();
  }

  double energy(const Vector& u) const {
    const double p = pb_.p;
    double s = 0.0;
    for (const Edge& e : grid_.edges()) s += std::pow(std::abs(edge_gradient(u, e)), p);
    s *= grid_.cell_weight() / p;
    for (int i : free_nodes_) s -= pb_.load[i] * u[i];
    return s;
  }

  Evaluation evaluate(const Vector& u) const {
    const double p = pb_.p;
    const double hd = grid_.cell_weight();
    const double h = grid_.h();
    Evaluation ev;
    ev.grad_free = Vector::Zero(num_free());
    Vector full = Vector::Zero(grid_.num_nodes());
    double s = 0.0;
    for (const Edge& e : grid_.edges()) {
      const double g = edge_gradient(u, e);
      const double ag = std::abs(g);
      s += std::pow(ag, p);
      const double flux = ag == 0.0 ? 0.0 : hd * std::pow(ag, p - 2.0) * g / h;
      if (e.head != kBoundary) full[e.head] += flux;
      if (e.tail != kBoundary) full[e.tail] -= flux;
    }
    ev.energy = s * hd / p;
    double load_sq = 0.0;
    for (int k = 0; k < num_free(); ++k) {
      const int i = free_nodes_[static_cast<std::size_t>(k)];
      ev.energy -= pb_.load[i] * u[i];
      ev.grad_free[k] = full[i] - pb_.load[i];
      load_sq += pb_.load[i] * pb_.load[i];
    }
    ev.scale = std::sqrt(load_sq) + full.norm();
    return ev;
  }

  SparseMatrix hessian(const Vector& u) const {
    const double p = pb_.p;
    const double hd = grid_.cell_weight();
    const double h = grid_.h();
    double gmax = 0.0;
    for (const Edge& e : grid_.edges()) gmax = std::max(gmax, std::abs(edge_gradient(u, e)));
    const double floor = std::max(gmax * 1e-10, 1e-300);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(grid_.edges().size() * 4);
    double diag_max = 0.0;
    for (const Edge& e : grid_.edges()) {
      const double ag = std::max(std::abs(edge_gradient(u, e)), floor);
      const double c = hd * (p - 1.0) * std::pow(ag, p - 2.0) / (h * h);
      const int a = free_index(e.head);
      const int b = free_index(e.tail);
      if (a >= 0) trip.emplace_back(a, a, c);
      if (b >= 0) trip.emplace_back(b, b, c);
      if (a >= 0 && b >= 0) {
        trip.emplace_back(a, b, -c);
        trip.emplace_back(b, a, -c);
      }
      diag_max = std::max(diag_max, c);
    }
    const double ridge = 1e-14 * diag_max + 1e-300;
    for (int k = 0; k < num_free(); ++k) trip.emplace_back(k, k, ridge);
    SparseMatrix hmat(num_free(), num_free());
    hmat.setFromTriplets(trip.begin(), trip.end());
    return hmat;
  }

 private:
  const Grid& grid_;
  const PDirichletProblem& pb_;
  std::vector<int> free_index_;
  std::vector<int> free_nodes_;
};

}  // namespace

PDirichletResult solve_p_dirichlet(const Grid& grid, const PDirichletProblem& pb,
                                   const Vector& initial, double tolerance,
                                   int max_iterations) {
  if (initial.size() != grid.num_nodes() || pb.load.size() != grid.num_nodes())
    throw std::invalid_argument("solve_p_dirichlet: size mismatch");
  const Problem prob(grid, pb);
  PDirichletResult out{initial, {}};
  Vector& u = out.u;
  if (!pb.fixed.empty()) {
    for (int i = 0; i < grid.num_nodes(); ++i)
      if (pb.fixed[static_cast<std::size_t>(i)]) u[i] = pb.fixed_values[i];
  }
  if (prob.num_free() == 0) return out;

  Eigen::SimplicialLDLT<SparseMatrix> ldlt;
  bool analyzed = false;
  Evaluation ev = prob.evaluate(u);
  SolverStatus& st = out.status;
  st.converged = false;
  for (int it = 0;; ++it) {
    st.iterations = it;
    st.residual = ev.scale > 0.0 ? ev.grad_free.norm() / ev.scale : 0.0;
    if (st.residual <= tolerance) {
      st.converged = true;
      break;
    }
    if (it >= max_iterations) {
      st.hit_cap = true;
      break;
    }
    const SparseMatrix hmat = prob.hessian(u);
    if (!analyzed) {
      ldlt.analyzePattern(hmat);
      analyzed = true;
    }
    ldlt.factorize(hmat);
    Vector dir = ldlt.info() == Eigen::Success ? Vector(ldlt.solve(-ev.grad_free))
                                               : Vector(-ev.grad_free);
    double slope = ev.grad_free.dot(dir);
    if (!(slope < 0.0) || !dir.allFinite()) {
      dir = -ev.grad_free;
      slope = -ev.grad_free.squaredNorm();
    }
    double t = 1.0;
    bool accepted = false;
    Vector trial = u;
    const double slack = 1e-14 * (std::abs(ev.energy) + 1e-300);
    for (int ls = 0; ls < 80; ++ls) {
      for (int k = 0; k < prob.num_free(); ++k)
        trial[prob.free_nodes()[static_cast<std::size_t>(k)]] =
            u[prob.free_nodes()[static_cast<std::size_t>(k)]] + t * dir[k];
      const double e_new = prob.energy(trial);
      if (std::isfinite(e_new) && e_new <= ev.energy + 1e-4 * t * slope + slack) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) break;  // no representable decrease left
    u = trial;
    ev = prob.evaluate(u);
  }
  return out;
}

}  // namespace nlab::detail
