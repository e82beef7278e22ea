#include "nlab/cut_norm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <Eigen/SparseCholesky>

#include "nlab/parallel.hpp"

namespace nlab {

namespace detail {

SingularTriple top_singular_triple(const DenseMatrix& m, int dense_limit) {
  const Eigen::Index rows = m.rows();
  const Eigen::Index cols = m.cols();
  SingularTriple out{0.0, Vector::Zero(rows), Vector::Zero(cols)};
  if (rows == 0 || cols == 0 || m.isZero(0.0)) return out;

  if (std::max(rows, cols) <= dense_limit) {
    Eigen::BDCSVD<Eigen::MatrixXd> svd(Eigen::MatrixXd(m), Eigen::ComputeThinU | Eigen::ComputeThinV);
    out.sigma = svd.singularValues()[0];
    out.left = svd.matrixU().col(0);
    out.right = svd.matrixV().col(0);
    return out;
  }

  // Lanczos on m^T m with full reorthogonalization.
  const int max_steps = static_cast<int>(std::min<Eigen::Index>(cols, 400));
  Eigen::MatrixXd q(cols, max_steps + 1);
  std::vector<double> alpha;
  std::vector<double> beta;
  Vector v(cols);
  for (Eigen::Index j = 0; j < cols; ++j) v[j] = 1.0 + 0.5 * std::sin(1.7 * static_cast<double>(j) + 0.3);
  q.col(0) = v.normalized();
  double lambda = 0.0;
  Vector ritz;
  for (int k = 0; k < max_steps; ++k) {
    Vector w = m.transpose() * (m * q.col(k));
    alpha.push_back(q.col(k).dot(w));
    for (int pass = 0; pass < 2; ++pass)
      w -= q.leftCols(k + 1) * (q.leftCols(k + 1).transpose() * w);
    const double b = w.norm();
    const int size = k + 1;
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(size, size);
    for (int i = 0; i < size; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < size) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    lambda = es.eigenvalues()[size - 1];
    ritz = es.eigenvectors().col(size - 1);
    const double resid = std::abs(b * ritz[size - 1]);
    if (resid <= 1e-14 * std::max(lambda, 1e-300) || b <= 1e-300 || k + 1 == max_steps) {
      out.right = q.leftCols(size) * ritz;
      break;
    }
    beta.push_back(b);
    q.col(k + 1) = w / b;
  }
  out.right.normalize();
  const Vector mv = m * out.right;
  out.sigma = mv.norm();
  out.left = out.sigma > 0.0 ? Vector(mv / out.sigma) : Vector::Zero(rows);
  return out;
}

}  // namespace detail

namespace {

using NaturalLLT =
    Eigen::SimplicialLLT<SparseMatrix, Eigen::Lower, Eigen::NaturalOrdering<int>>;

CutNormResult zero_result(const GridPtr& g, bool lower_bound) {
  return {0.0, GridFunction::zero(g), GridFunction::zero(g), lower_bound, 0, false};
}

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

Vector gaussian_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = nd(rng);
  return v;
}

// Random sine series with 1/(frequency) decay.
Vector smooth_random(const Grid& g, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  const int modes = std::min(g.n(), 8);
  const double pi = std::numbers::pi;
  Vector v = Vector::Zero(g.num_nodes());
  if (g.dim() == 1) {
    for (int m = 1; m <= modes; ++m) {
      const double a = nd(rng) / m;
      for (int i = 0; i < g.num_nodes(); ++i) v[i] += a * std::sin(m * pi * g.nodes()[static_cast<std::size_t>(i)][0]);
    }
  } else {
    for (int m1 = 1; m1 <= modes; ++m1)
      for (int m2 = 1; m2 <= modes; ++m2) {
        const double a = nd(rng) / (m1 * m2);
        for (int i = 0; i < g.num_nodes(); ++i) {
          const Point& x = g.nodes()[static_cast<std::size_t>(i)];
          v[i] += a * std::sin(m1 * pi * x[0]) * std::sin(m2 * pi * x[1]);
        }
      }
  }
  return v;
}

}  // namespace

CutNormResult cut_norm_exact_p2(const PairMeasure& mu) {
  const GridPtr& gp = mu.grid_ptr();
  const int n = gp->num_nodes();
  if (n > kExactCutNormMaxNodes)
    throw std::invalid_argument("cut_norm_exact_p2: " + std::to_string(n) +
                                " nodes exceed the cap of " +
                                std::to_string(kExactCutNormMaxNodes));
  const DenseMatrix p = mu.pairing_matrix();
  if (p.isZero(0.0)) return zero_result(gp, false);

  NaturalLLT llt(stiffness_matrix(*gp));
  if (llt.info() != Eigen::Success) throw std::runtime_error("cut_norm_exact_p2: factorization failed");
  // M = L^{-1} P L^{-T}
  Eigen::MatrixXd a = llt.matrixL().solve(Eigen::MatrixXd(p));
  Eigen::MatrixXd at = a.transpose();
  Eigen::MatrixXd mt = llt.matrixL().solve(at);
  const DenseMatrix m = mt.transpose();

  const detail::SingularTriple top = detail::top_singular_triple(m);
  Vector phi = llt.matrixU().solve(top.left);
  Vector psi = llt.matrixU().solve(top.right);
  phi /= sobolev_norm(*gp, phi, 2.0);
  psi /= sobolev_norm(*gp, psi, 2.0);
  GridFunction fphi(gp, std::move(phi));
  GridFunction fpsi(gp, std::move(psi));
  if (pair_integral(mu, fphi, fpsi) < 0.0) fphi = fphi * -1.0;
  return {top.sigma, std::move(fphi), std::move(fpsi), false, 0, false};
}

CutNormResult cut_norm_alternating(const PairMeasure& mu, double p, std::uint64_t seed,
                                   int restarts) {
  validate_p(p, "cut_norm_alternating");
  if (restarts < 1) throw std::invalid_argument("cut_norm_alternating: restarts must be >= 1");
  const GridPtr& gp = mu.grid_ptr();
  const int n = gp->num_nodes();

  std::optional<StiffnessSolver> k2;
  if (p == 2.0) k2.emplace(gp);
  auto maximize = [&](const Vector& functional, const Vector* warm) {
    if (k2) return dual_norm(*k2, functional);
    DualNormOptions opts;
    opts.method = DualNormMethod::iterative;
    opts.warm_start = warm;
    return dual_norm(gp, functional, p, opts);
  };

  Vector top_right;
  if (n <= kExactCutNormMaxNodes) top_right = detail::top_singular_triple(mu.pairing_matrix()).right;

  std::vector<std::optional<CutNormResult>> runs(static_cast<std::size_t>(restarts));
  parallel_for(runs.size(), [&](std::size_t r) {
    Vector start;
    if (r == 0 && top_right.size() == n && !top_right.isZero(0.0)) {
      start = top_right;
    } else {
      auto rng = make_rng(seed, r);
      start = gaussian_vector(rng, n);
    }
    GridFunction psi(gp, start / sobolev_norm(*gp, start, p));
    GridFunction phi = GridFunction::zero(gp);
    double value = 0.0;
    long alternations = 0;
    bool capped = true;
    Vector warm_phi;
    Vector warm_psi = psi.values();
    for (int it = 0; it < kMaxAlternations; ++it) {
      ++alternations;
      const Vector l1 = marginal_weighted_by(mu, psi).weights();
      DualNormResult a = maximize(l1, warm_phi.size() ? &warm_phi : nullptr);
      if (a.value == 0.0) {
        capped = false;
        break;
      }
      phi = a.maximizer;
      warm_phi = phi.values();
      const Vector l2 = comarginal_weighted_by(mu, phi).weights();
      DualNormResult b = maximize(l2, &warm_psi);
      if (b.value == 0.0) {
        capped = false;
        break;
      }
      psi = b.maximizer;
      warm_psi = psi.values();
      const double prev = value;
      value = b.value;
      if (it > 0 && value - prev <= kAlternatingTolerance * value) {
        capped = false;
        break;
      }
    }
    const double signed_v = pair_integral(mu, phi, psi);
    if (signed_v < 0.0) psi = -1.0 * psi;
    runs[r] = CutNormResult{std::abs(signed_v), phi, psi, true, alternations, capped};
  });

  CutNormResult best = zero_result(gp, true);
  long total = 0;
  bool capped = false;
  for (const auto& run : runs) {
    total += run->evaluations;
    capped = capped || run->hit_cap;
    if (run->value > best.value) best = *run;
  }
  best.evaluations = total;
  best.hit_cap = capped;
  return best;
}

CutNormResult cut_norm_bruteforce(const PairMeasure& mu, double p, long budget,
                                  std::uint64_t seed) {
  validate_p(p, "cut_norm_bruteforce");
  const GridPtr& gp = mu.grid_ptr();
  const int n = gp->num_nodes();
  if (n > kBruteForceMaxNodes)
    throw std::invalid_argument("cut_norm_bruteforce: " + std::to_string(n) +
                                " nodes exceed the cap of " + std::to_string(kBruteForceMaxNodes));
  if (budget < 0) throw std::invalid_argument("cut_norm_bruteforce: budget must be >= 0");

  CutNormResult best = zero_result(gp, true);
  long used = 0;
  auto evaluate = [&](const Vector& a, const Vector& b) {
    ++used;
    const double na = sobolev_norm(*gp, a, p);
    const double nb = sobolev_norm(*gp, b, p);
    if (na == 0.0 || nb == 0.0) return 0.0;
    GridFunction phi(gp, a / na);
    GridFunction psi(gp, b / nb);
    const double signed_v = pair_integral(mu, phi, psi);
    const double v = std::abs(signed_v);
    if (signed_v < 0.0) psi = -1.0 * psi;  // report a pair that realises +v
    if (v > best.value) {
      best.value = v;
      best.phi = std::move(phi);
      best.psi = std::move(psi);
    }
    return v;
  };

  // Hat pairs: the nodal basis functions.
  for (int i = 0; i < n && used < budget; ++i)
    for (int j = 0; j < n && used < budget; ++j)
      evaluate(Vector::Unit(n, i), Vector::Unit(n, j));

  auto rng = make_rng(seed, 0);
  const long random_share = used + (budget - used) / 5;
  std::bernoulli_distribution coin(0.5);
  while (used < random_share) {
    const Vector a = coin(rng) ? smooth_random(*gp, rng) : gaussian_vector(rng, n);
    const Vector b = coin(rng) ? smooth_random(*gp, rng) : gaussian_vector(rng, n);
    evaluate(a, b);
  }

  // (1+1) evolution strategy with the one-fifth success rule.
  if (best.value > 0.0) {
    Vector a = best.phi.values();
    Vector b = best.psi.values();
    double current = best.value;
    const double sigma0 = 0.3;
    double sigma = sigma0;
    std::normal_distribution<double> nd;
    while (used < budget) {
      const double scale_a = a.norm() / std::sqrt(static_cast<double>(n));
      const double scale_b = b.norm() / std::sqrt(static_cast<double>(n));
      Vector ta = a;
      Vector tb = b;
      for (int i = 0; i < n; ++i) {
        ta[i] += sigma * scale_a * nd(rng);
        tb[i] += sigma * scale_b * nd(rng);
      }
      const double v = evaluate(ta, tb);
      if (v > current) {
        current = v;
        a = ta / sobolev_norm(*gp, ta, p);
        b = tb / sobolev_norm(*gp, tb, p);
        sigma *= std::exp(1.0 / 3.0);
      } else {
        sigma *= std::exp(-1.0 / 12.0);
      }
      if (sigma < 1e-9) sigma = sigma0;
    }
  }
  best.evaluations = used;
  return best;
}

GraphonCutResult graphon_cut_norm(const PairMeasure& mu, GraphonMode mode, std::uint64_t seed,
                                  int restarts) {
  const int n = mu.grid().num_nodes();
  const DenseMatrix w = mu.pairing_matrix();
  GraphonCutResult best;
  best.phi.assign(static_cast<std::size_t>(n), 0);
  best.psi.assign(static_cast<std::size_t>(n), 0);

  if (mode == GraphonMode::subset_exact) {
    if (n > kSubsetExactMaxNodes)
      throw std::invalid_argument("graphon_cut_norm: subset_exact supports at most " +
                                  std::to_string(kSubsetExactMaxNodes) + " nodes, got " +
                                  std::to_string(n));
    best.exact = true;
    unsigned long best_phi = 0;
    unsigned long best_psi = 0;
    Vector r(n);
    for (unsigned long mask = 0; mask < (1ul << n); ++mask) {
      r.setZero();
      for (int i = 0; i < n; ++i)
        if (mask >> i & 1ul) r += w.row(i).transpose();
      double pos = 0.0;
      double neg = 0.0;
      unsigned long pos_mask = 0;
      unsigned long neg_mask = 0;
      for (int j = 0; j < n; ++j) {
        if (r[j] > 0.0) {
          pos += r[j];
          pos_mask |= 1ul << j;
        } else if (r[j] < 0.0) {
          neg -= r[j];
          neg_mask |= 1ul << j;
        }
      }
      const bool use_pos = pos > neg || (pos == neg && pos_mask <= neg_mask);
      const double v = use_pos ? pos : neg;
      const unsigned long psi_mask = use_pos ? pos_mask : neg_mask;
      if (v > best.value) {
        best.value = v;
        best_phi = mask;
        best_psi = psi_mask;
      }
    }
    for (int i = 0; i < n; ++i) {
      best.phi[static_cast<std::size_t>(i)] = static_cast<char>(best_phi >> i & 1ul);
      best.psi[static_cast<std::size_t>(i)] = static_cast<char>(best_psi >> i & 1ul);
    }
    return best;
  }

  if (restarts < 1) throw std::invalid_argument("graphon_cut_norm: restarts must be >= 1");
  auto rng = make_rng(seed, 0);
  std::bernoulli_distribution coin(0.5);
  for (int r = 0; r < restarts; ++r) {
    Vector start(n);
    for (int i = 0; i < n; ++i) start[i] = r == 0 ? 1.0 : (coin(rng) ? 1.0 : 0.0);
    for (const double sgn : {1.0, -1.0}) {
      Vector phi = start;
      Vector psi = Vector::Zero(n);
      for (int it = 0; it < kMaxAlternations; ++it) {
        const Vector col = w.transpose() * phi;
        Vector next_psi(n);
        for (int j = 0; j < n; ++j) next_psi[j] = sgn * col[j] > 0.0 ? 1.0 : 0.0;
        const Vector row = w * next_psi;
        Vector next_phi(n);
        for (int i = 0; i < n; ++i) next_phi[i] = sgn * row[i] > 0.0 ? 1.0 : 0.0;
        const bool done = next_phi == phi && next_psi == psi;
        phi = next_phi;
        psi = next_psi;
        if (done) break;
      }
      const double v = sgn * phi.dot(w * psi);
      if (v > best.value) {
        best.value = v;
        for (int i = 0; i < n; ++i) {
          best.phi[static_cast<std::size_t>(i)] = phi[i] > 0.0;
          best.psi[static_cast<std::size_t>(i)] = psi[i] > 0.0;
        }
      }
    }
  }
  return best;
}

}  // namespace nlab
