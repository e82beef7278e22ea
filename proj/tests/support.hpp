#pragma once
// Shared test helpers: seeded random inputs and hand-built reference matrices.

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "nlab/grid.hpp"
#include "nlab/measures.hpp"

namespace testing {

using Rng = std::mt19937_64;

inline nlab::Vector random_vector(Rng& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  nlab::Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

inline nlab::GridFunction random_function(const nlab::GridPtr& g, Rng& rng, double scale = 1.0) {
  return nlab::GridFunction(g, scale * random_vector(rng, g->num_nodes()));
}

inline nlab::DenseMatrix random_masses(Rng& rng, int n, bool is_signed) {
  std::uniform_real_distribution<double> u(is_signed ? -1.0 : 0.0, 1.0);
  nlab::DenseMatrix w(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) w(i, j) = u(rng) / (n * n);
  return w;
}

inline nlab::PairMeasure random_density(const nlab::GridPtr& g, Rng& rng, bool is_signed = false) {
  return nlab::PairMeasure::cell_density(g, random_masses(rng, g->num_nodes(), is_signed), is_signed);
}

// Stiffness of sum_e h^d (du_e / h)^2, written out by hand: tridiag(-1, 2, -1)/h
// in 1D, the unscaled five-point Laplacian in 2D.
inline Eigen::MatrixXd reference_stiffness(const nlab::Grid& g) {
  const int n = g.n();
  const int N = g.num_nodes();
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(N, N);
  if (g.dim() == 1) {
    for (int i = 0; i < n; ++i) {
      k(i, i) = 2.0 / g.h();
      if (i + 1 < n) k(i, i + 1) = k(i + 1, i) = -1.0 / g.h();
    }
    return k;
  }
  auto id = [n](int i, int j) { return j * n + i; };
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      k(id(i, j), id(i, j)) = 4.0;
      if (i + 1 < n) k(id(i, j), id(i + 1, j)) = k(id(i + 1, j), id(i, j)) = -1.0;
      if (j + 1 < n) k(id(i, j), id(i, j + 1)) = k(id(i, j + 1), id(i, j)) = -1.0;
    }
  return k;
}

// max over unit phi, psi of phi^T M psi in the K-norm: sigma_max(K^{-1/2} M K^{-1/2}),
// through an eigendecomposition of K (independent of the Cholesky route).
inline double reference_cut_norm_p2(const nlab::Grid& g, const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(reference_stiffness(g));
  const Eigen::MatrixXd isq =
      es.eigenvectors() * es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
      es.eigenvectors().transpose();
  const Eigen::MatrixXd a = isq * m * isq;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  return svd.singularValues()(0);
}

}  // namespace testing
