#pragma once
// Finite measures on Omega x Omega and the one-variable measures derived from
// them by integrating a weight in the other variable.

#include <functional>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "nlab/grid.hpp"
#include "nlab/integrands.hpp"

namespace nlab {

using DenseMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// Nodal masses on interior nodes: int phi dm = sum_i m_i phi_i.
class MarginalMeasure {
 public:
  MarginalMeasure(GridPtr grid, Vector weights);

  // Masses c_i w_i of a nodal density c with the grid quadrature weights.
  static MarginalMeasure from_density(GridPtr grid, const Vector& density);
  static MarginalMeasure lebesgue(GridPtr grid);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  const Vector& weights() const noexcept { return weights_; }
  double mass() const noexcept { return weights_.sum(); }
  double integrate(const GridFunction& phi) const;

 private:
  GridPtr grid_;
  Vector weights_;
};

struct Atom {
  Point x;
  Point y;
  double mass;
};

// coefficient * (first (x) second)
struct ProductTerm {
  Vector first;
  Vector second;
  double coefficient = 1.0;
};

// A measure on Omega x Omega held as a sum of parts: a dense matrix of cell
// masses over node pairs, a list of atoms (test functions are interpolated
// at atom positions), and weighted products of marginals. Factories build a
// single representation; sums and differences concatenate parts.
class PairMeasure {
 public:
  enum class Representation { empty, cell_density, atom_list, product_of_marginals, mixed };

  // weights(i, j) is the mass at node pair (x_i, y_j).
  static PairMeasure cell_density(GridPtr grid, DenseMatrix weights, bool is_signed = false);
  // Masses w_i w_j rho(x_i, y_j) from a density function.
  static PairMeasure from_density(GridPtr grid,
                                  const std::function<double(const Point&, const Point&)>& rho,
                                  bool is_signed = false);
  static PairMeasure lebesgue(GridPtr grid);
  static PairMeasure atoms(GridPtr grid, std::vector<Atom> atoms, bool is_signed = false);
  static PairMeasure product(const MarginalMeasure& first, const MarginalMeasure& second,
                             double coefficient = 1.0, bool is_signed = false);
  static PairMeasure zero(GridPtr grid);

  const Grid& grid() const noexcept { return *grid_; }
  const GridPtr& grid_ptr() const noexcept { return grid_; }
  bool is_signed() const noexcept { return signed_; }
  Representation representation() const noexcept;

  const std::optional<DenseMatrix>& density() const noexcept { return density_; }
  const std::vector<Atom>& atom_list() const noexcept { return atoms_; }
  const std::vector<ProductTerm>& products() const noexcept { return products_; }

  PairMeasure operator+(const PairMeasure& o) const;
  PairMeasure operator-(const PairMeasure& o) const;  // always flagged signed
  PairMeasure scaled(double c) const;
  // mu^T(A x B) = mu(B x A)
  PairMeasure transposed() const;

  // Dense matrix P with pair_integral(mu, phi, psi) = phi^T P psi.
  DenseMatrix pairing_matrix() const;

 private:
  explicit PairMeasure(GridPtr grid) : grid_(std::move(grid)) {}
  void validate() const;

  GridPtr grid_;
  bool signed_ = false;
  std::optional<DenseMatrix> density_;
  std::vector<Atom> atoms_;
  std::vector<ProductTerm> products_;
};

double total_mass(const PairMeasure& mu);

// int phi(x) psi(y) dmu(x, y)
double pair_integral(const PairMeasure& mu, const GridFunction& phi, const GridFunction& psi);

// int f(u(x), v(y)) dmu(x, y). Throws NonFiniteError naming the first
// offending (s, t) when f is not finite on the range of (u, v).
double double_integral(const PairMeasure& mu, const PairIntegrand& f, const GridFunction& u,
                       const GridFunction& v);

// mu_psi(B) = int_{B x Omega} psi(y) dmu
MarginalMeasure marginal_weighted_by(const PairMeasure& mu, const GridFunction& psi);
// mu^u(B) = int_{Omega x B} u(x) dmu
MarginalMeasure comarginal_weighted_by(const PairMeasure& mu, const GridFunction& u);

// Signed difference mu - nu, the input of cut-norm distances.
PairMeasure cut_distance_inputs(const PairMeasure& mu, const PairMeasure& nu);

}  // namespace nlab
