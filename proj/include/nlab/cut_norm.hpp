#pragma once
// The Sobolev cut norm
//   ||mu||_box = sup { |int phi(x) psi(y) dmu| : ||phi||_{1,p}, ||psi||_{1,p} <= 1 }
// over discrete test functions, and the classical cut norm of a kernel.

#include <cstdint>
#include <vector>

#include "nlab/measures.hpp"
#include "nlab/sobolev.hpp"

namespace nlab {

inline constexpr int kExactCutNormMaxNodes = 4096;
inline constexpr int kBruteForceMaxNodes = 64;
inline constexpr int kSubsetExactMaxNodes = 14;
inline constexpr int kMaxAlternations = 1000;
inline constexpr double kAlternatingTolerance = 1e-10;

struct CutNormResult {
  double value;
  GridFunction phi;  // unit norm (zero when value == 0)
  GridFunction psi;
  bool lower_bound;    // true unless the value is exact
  long evaluations;    // alternations summed over restarts, or pairs sampled
  bool hit_cap;
};

// p = 2: the largest singular value of L^{-1} P L^{-T}, with K = L L^T the
// stiffness matrix and P the pairing matrix. Throws std::invalid_argument
// beyond kExactCutNormMaxNodes nodes.
CutNormResult cut_norm_exact_p2(const PairMeasure& mu);

// Alternating maximization: with psi fixed the phi-problem is the dual norm
// of the functional mu_psi, and vice versa. Restart 0 starts from the top
// singular pair of the raw pairing matrix, the others from seeded random
// vectors. Returns the best pair found, a lower bound on the norm.
CutNormResult cut_norm_alternating(const PairMeasure& mu, double p, std::uint64_t seed,
                                   int restarts);

// Sampling lower bound that only uses pair_integral and sobolev_norm: all
// (hat, hat) pairs, seeded random smooth pairs, then a (1+1) evolution
// strategy from the best pair. Every evaluated pair counts toward `budget`.
// Limited to kBruteForceMaxNodes nodes.
CutNormResult cut_norm_bruteforce(const PairMeasure& mu, double p, long budget,
                                  std::uint64_t seed);

enum class GraphonMode { subset_exact, alternating };

struct GraphonCutResult {
  double value = 0.0;
  std::vector<char> phi;  // indicator of the row set
  std::vector<char> psi;  // indicator of the column set
  bool exact = false;
};

// sup over phi, psi : nodes -> [0,1] of |sum_ij W_ij phi_i psi_j| with W the
// pairing matrix of mu (cell masses for a cell density). The sup is attained
// at indicators. subset_exact enumerates all row sets with the column set
// chosen optimally, and is limited to kSubsetExactMaxNodes nodes;
// ties resolve to the smallest (phi, psi) masks, node 0 being the lowest bit.
GraphonCutResult graphon_cut_norm(const PairMeasure& mu, GraphonMode mode,
                                  std::uint64_t seed = 0, int restarts = 16);

namespace detail {
// Top singular triple of a dense matrix; used for initialization and exposed
// for tests. Dense SVD up to `dense_limit` rows, Lanczos beyond.
struct SingularTriple {
  double sigma = 0.0;
  Vector left;
  Vector right;
};
SingularTriple top_singular_triple(const DenseMatrix& m, int dense_limit = 512);
}  // namespace detail

}  // namespace nlab
