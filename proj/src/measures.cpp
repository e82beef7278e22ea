#include "nlab/measures.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "nlab/simd/kernels.hpp"
#include "nlab/sobolev.hpp"

namespace nlab {
namespace {

std::span<const double> as_span(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

std::span<const double> row_span(const DenseMatrix& m, Eigen::Index i) {
  return {m.data() + i * m.cols(), static_cast<std::size_t>(m.cols())};
}

Vector matvec(const DenseMatrix& m, const Vector& x) {
  Vector y(m.rows());
  simd::matvec({m.data(), static_cast<std::size_t>(m.size())}, m.rows(), m.cols(), as_span(x),
               {y.data(), static_cast<std::size_t>(y.size())});
  return y;
}

Vector matvec_t(const DenseMatrix& m, const Vector& x) {
  Vector y(m.cols());
  simd::matvec_transposed({m.data(), static_cast<std::size_t>(m.size())}, m.rows(), m.cols(),
                          as_span(x), {y.data(), static_cast<std::size_t>(y.size())});
  return y;
}

void spread(const Grid& g, const Point& at, double value, Vector& into) {
  const Stencil s = interpolation_stencil(g, at);
  for (int k = 0; k < s.size; ++k) into[s.node[k]] += s.weight[k] * value;
}

bool strictly_inside(const Grid& g, const Point& p) {
  for (int a = 0; a < g.dim(); ++a)
    if (!(p[static_cast<std::size_t>(a)] > 0.0 && p[static_cast<std::size_t>(a)] < 1.0))
      return false;
  return true;
}

[[noreturn]] void throw_non_finite(double s, double t) {
  std::ostringstream os;
  os << "double_integral: integrand is not finite at (s, t) = (" << s << ", " << t << ")";
  throw NonFiniteError(os.str(), s, t);
}

// sum_i c_i sum_j w_ij f(u_i, v_j) with structured integrands dispatched to
// the vector kernels. `rows(i)` gives the weight row w_i., `scale(i)` gives c_i.
template <class RowWeights, class RowScale>
double pair_sum(const PairIntegrand& f, const Vector& u, const Vector& v, RowWeights rows,
                RowScale scale) {
  double total = 0.0;
  const auto vs = as_span(v);
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double c = scale(i);
    if (c == 0.0) continue;
    const auto w = rows(i);
    double row = 0.0;
    switch (f.kernel) {
      case PairKernel::lorentz:
        row = simd::lorentz_row(w, u[i], vs);
        break;
      case PairKernel::squared_difference:
        row = simd::sqdiff_row(w, u[i], vs);
        break;
      case PairKernel::product:
        row = u[i] * simd::dot(w, vs);
        break;
      case PairKernel::generic:
        for (Eigen::Index j = 0; j < v.size(); ++j) {
          const double wij = w[static_cast<std::size_t>(j)];
          if (wij != 0.0) row += wij * f(u[i], v[j]);
        }
        break;
    }
    total += c * row;
  }
  return total;
}

void find_non_finite(const PairIntegrand& f, const Vector& u, const Vector& v) {
  for (Eigen::Index i = 0; i < u.size(); ++i)
    for (Eigen::Index j = 0; j < v.size(); ++j)
      if (!std::isfinite(f(u[i], v[j]))) throw_non_finite(u[i], v[j]);
}

}  // namespace

MarginalMeasure::MarginalMeasure(GridPtr grid, Vector weights)
    : grid_(std::move(grid)), weights_(std::move(weights)) {
  if (weights_.size() != grid_->num_nodes())
    throw std::invalid_argument("MarginalMeasure: weight count does not match grid");
  if (!weights_.allFinite()) throw std::invalid_argument("MarginalMeasure: non-finite weight");
}

MarginalMeasure MarginalMeasure::from_density(GridPtr grid, const Vector& density) {
  Vector w = functional_from_density(*grid, density);
  return MarginalMeasure(std::move(grid), std::move(w));
}

MarginalMeasure MarginalMeasure::lebesgue(GridPtr grid) {
  Vector w = grid->quadrature_weights();
  return MarginalMeasure(std::move(grid), std::move(w));
}

double MarginalMeasure::integrate(const GridFunction& phi) const {
  require_same_grid(*grid_, phi.grid(), "MarginalMeasure::integrate");
  return simd::dot(as_span(weights_), as_span(phi.values()));
}

PairMeasure PairMeasure::cell_density(GridPtr grid, DenseMatrix weights, bool is_signed) {
  const int n = grid->num_nodes();
  if (weights.rows() != n || weights.cols() != n)
    throw std::invalid_argument("PairMeasure::cell_density: expected an N x N weight matrix");
  PairMeasure m(std::move(grid));
  m.signed_ = is_signed;
  m.density_ = std::move(weights);
  m.validate();
  return m;
}

PairMeasure PairMeasure::from_density(
    GridPtr grid, const std::function<double(const Point&, const Point&)>& rho, bool is_signed) {
  const int n = grid->num_nodes();
  const Vector& q = grid->quadrature_weights();
  DenseMatrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      w(i, j) = q[i] * q[j] * rho(grid->nodes()[static_cast<std::size_t>(i)],
                                  grid->nodes()[static_cast<std::size_t>(j)]);
  return cell_density(std::move(grid), std::move(w), is_signed);
}

PairMeasure PairMeasure::lebesgue(GridPtr grid) {
  const Vector& q = grid->quadrature_weights();
  DenseMatrix w = q * q.transpose();
  return cell_density(std::move(grid), std::move(w));
}

PairMeasure PairMeasure::atoms(GridPtr grid, std::vector<Atom> atoms, bool is_signed) {
  PairMeasure m(std::move(grid));
  m.signed_ = is_signed;
  m.atoms_ = std::move(atoms);
  m.validate();
  return m;
}

PairMeasure PairMeasure::product(const MarginalMeasure& first, const MarginalMeasure& second,
                                 double coefficient, bool is_signed) {
  require_same_grid(first.grid(), second.grid(), "PairMeasure::product");
  PairMeasure m(first.grid_ptr());
  m.signed_ = is_signed;
  m.products_.push_back(ProductTerm{first.weights(), second.weights(), coefficient});
  m.validate();
  return m;
}

PairMeasure PairMeasure::zero(GridPtr grid) { return PairMeasure(std::move(grid)); }

void PairMeasure::validate() const {
  const Grid& g = *grid_;
  if (density_) {
    if (!density_->allFinite()) throw std::invalid_argument("PairMeasure: non-finite cell weight");
    if (!signed_ && density_->minCoeff() < 0.0)
      throw std::invalid_argument("PairMeasure: negative cell weight in a nonnegative measure");
  }
  for (const Atom& a : atoms_) {
    if (!std::isfinite(a.mass)) throw std::invalid_argument("PairMeasure: non-finite atom mass");
    if (!signed_ && a.mass < 0.0)
      throw std::invalid_argument("PairMeasure: negative atom mass in a nonnegative measure");
    if (!strictly_inside(g, a.x) || !strictly_inside(g, a.y))
      throw std::invalid_argument("PairMeasure: atoms must lie strictly inside Omega x Omega");
  }
  for (const ProductTerm& t : products_) {
    if (t.first.size() != g.num_nodes() || t.second.size() != g.num_nodes())
      throw std::invalid_argument("PairMeasure: product marginal size mismatch");
    if (!t.first.allFinite() || !t.second.allFinite() || !std::isfinite(t.coefficient))
      throw std::invalid_argument("PairMeasure: non-finite product term");
    if (!signed_ && (t.coefficient < 0.0 || t.first.minCoeff() < 0.0 || t.second.minCoeff() < 0.0))
      throw std::invalid_argument("PairMeasure: negative product term in a nonnegative measure");
  }
}

PairMeasure::Representation PairMeasure::representation() const noexcept {
  const int kinds = (density_ ? 1 : 0) + (atoms_.empty() ? 0 : 1) + (products_.empty() ? 0 : 1);
  if (kinds == 0) return Representation::empty;
  if (kinds > 1) return Representation::mixed;
  if (density_) return Representation::cell_density;
  return atoms_.empty() ? Representation::product_of_marginals : Representation::atom_list;
}

PairMeasure PairMeasure::operator+(const PairMeasure& o) const {
  require_same_grid(*grid_, o.grid(), "PairMeasure +");
  PairMeasure r = *this;
  r.signed_ = signed_ || o.signed_;
  if (o.density_) {
    if (r.density_)
      *r.density_ += *o.density_;
    else
      r.density_ = o.density_;
  }
  r.atoms_.insert(r.atoms_.end(), o.atoms_.begin(), o.atoms_.end());
  r.products_.insert(r.products_.end(), o.products_.begin(), o.products_.end());
  return r;
}

PairMeasure PairMeasure::scaled(double c) const {
  if (!std::isfinite(c)) throw std::invalid_argument("PairMeasure::scaled: non-finite factor");
  PairMeasure r = *this;
  r.signed_ = signed_ || c < 0.0;
  if (r.density_) *r.density_ *= c;
  for (Atom& a : r.atoms_) a.mass *= c;
  for (ProductTerm& t : r.products_) t.coefficient *= c;
  return r;
}

PairMeasure PairMeasure::operator-(const PairMeasure& o) const {
  PairMeasure r = *this + o.scaled(-1.0);
  r.signed_ = true;
  return r;
}

PairMeasure PairMeasure::transposed() const {
  PairMeasure r = *this;
  if (r.density_) r.density_ = DenseMatrix(density_->transpose());
  for (Atom& a : r.atoms_) std::swap(a.x, a.y);
  for (ProductTerm& t : r.products_) std::swap(t.first, t.second);
  return r;
}

DenseMatrix PairMeasure::pairing_matrix() const {
  const int n = grid_->num_nodes();
  DenseMatrix p = density_ ? *density_ : DenseMatrix::Zero(n, n);
  for (const Atom& a : atoms_) {
    const Stencil sx = interpolation_stencil(*grid_, a.x);
    const Stencil sy = interpolation_stencil(*grid_, a.y);
    for (int i = 0; i < sx.size; ++i)
      for (int j = 0; j < sy.size; ++j)
        p(sx.node[i], sy.node[j]) += a.mass * sx.weight[i] * sy.weight[j];
  }
  for (const ProductTerm& t : products_) p.noalias() += t.coefficient * t.first * t.second.transpose();
  return p;
}

double total_mass(const PairMeasure& mu) {
  double m = mu.density() ? mu.density()->sum() : 0.0;
  for (const Atom& a : mu.atom_list()) m += a.mass;
  for (const ProductTerm& t : mu.products()) m += t.coefficient * t.first.sum() * t.second.sum();
  return m;
}

double pair_integral(const PairMeasure& mu, const GridFunction& phi, const GridFunction& psi) {
  require_same_grid(mu.grid(), phi.grid(), "pair_integral");
  require_same_grid(mu.grid(), psi.grid(), "pair_integral");
  double r = 0.0;
  if (mu.density()) r += simd::dot(as_span(phi.values()), as_span(matvec(*mu.density(), psi.values())));
  for (const Atom& a : mu.atom_list()) r += a.mass * phi.interpolate(a.x) * psi.interpolate(a.y);
  for (const ProductTerm& t : mu.products())
    r += t.coefficient * simd::dot(as_span(t.first), as_span(phi.values())) *
         simd::dot(as_span(t.second), as_span(psi.values()));
  return r;
}

double double_integral(const PairMeasure& mu, const PairIntegrand& f, const GridFunction& u,
                       const GridFunction& v) {
  require_same_grid(mu.grid(), u.grid(), "double_integral");
  require_same_grid(mu.grid(), v.grid(), "double_integral");
  if (f.kernel == PairKernel::product) return pair_integral(mu, u, v);
  const Vector& uu = u.values();
  const Vector& vv = v.values();
  double r = 0.0;
  if (mu.density()) {
    const DenseMatrix& w = *mu.density();
    const double part = pair_sum(
        f, uu, vv, [&](Eigen::Index i) { return row_span(w, i); }, [](Eigen::Index) { return 1.0; });
    if (!std::isfinite(part)) find_non_finite(f, uu, vv);
    r += part;
  }
  for (const Atom& a : mu.atom_list()) {
    const double s = u.interpolate(a.x);
    const double t = v.interpolate(a.y);
    const double fv = f(s, t);
    if (!std::isfinite(fv)) throw_non_finite(s, t);
    r += a.mass * fv;
  }
  for (const ProductTerm& t : mu.products()) {
    double part = 0.0;
    switch (f.kernel) {
      case PairKernel::product:
        part = t.first.dot(uu) * t.second.dot(vv);
        break;
      case PairKernel::squared_difference:
        part = t.second.sum() * t.first.dot(uu.cwiseAbs2()) +
               t.first.sum() * t.second.dot(vv.cwiseAbs2()) -
               2.0 * t.first.dot(uu) * t.second.dot(vv);
        break;
      default: {
        const auto w2 = as_span(t.second);
        part = pair_sum(
            f, uu, vv, [&](Eigen::Index) { return w2; }, [&](Eigen::Index i) { return t.first[i]; });
        break;
      }
    }
    part *= t.coefficient;
    if (!std::isfinite(part)) find_non_finite(f, uu, vv);
    r += part;
  }
  return r;
}

MarginalMeasure marginal_weighted_by(const PairMeasure& mu, const GridFunction& psi) {
  require_same_grid(mu.grid(), psi.grid(), "marginal_weighted_by");
  Vector w = Vector::Zero(mu.grid().num_nodes());
  if (mu.density()) w += matvec(*mu.density(), psi.values());
  for (const Atom& a : mu.atom_list()) spread(mu.grid(), a.x, a.mass * psi.interpolate(a.y), w);
  for (const ProductTerm& t : mu.products()) w += t.coefficient * t.second.dot(psi.values()) * t.first;
  return MarginalMeasure(mu.grid_ptr(), std::move(w));
}

MarginalMeasure comarginal_weighted_by(const PairMeasure& mu, const GridFunction& u) {
  require_same_grid(mu.grid(), u.grid(), "comarginal_weighted_by");
  Vector w = Vector::Zero(mu.grid().num_nodes());
  if (mu.density()) w += matvec_t(*mu.density(), u.values());
  for (const Atom& a : mu.atom_list()) spread(mu.grid(), a.y, a.mass * u.interpolate(a.x), w);
  for (const ProductTerm& t : mu.products()) w += t.coefficient * t.first.dot(u.values()) * t.second;
  return MarginalMeasure(mu.grid_ptr(), std::move(w));
}

PairMeasure cut_distance_inputs(const PairMeasure& mu, const PairMeasure& nu) {
  require_same_grid(mu.grid(), nu.grid(), "cut_distance_inputs");
  return mu - nu;
}

}  // namespace nlab
