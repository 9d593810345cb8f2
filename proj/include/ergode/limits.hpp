#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ergode/chain.hpp"
#include "ergode/dense_matrix.hpp"
#include "ergode/solve.hpp"
#include "ergode/structure.hpp"

namespace ergode {

// One atom of the law of the almost-sure limit of (1/n) sum g(X_k).
struct PathwiseAtom {
  double value = 0.0;
  double probability = 0.0;
  bool operator==(const PathwiseAtom&) const = default;
};

// Everything the limit layer produces for a finite chain.
struct LimitReport {
  ClassStructure structure;
  HittingMatrix hitting;
  std::vector<double> mean_return;   // per state; +inf for transient states
  DenseMatrix cesaro;                // A with A_ij = f_ij / m_j on recurrent columns
  std::vector<double> occupation;    // o = mu0 . A
  double g_mean = 0.0;               // sum_j g(j) o_j
  std::vector<PathwiseAtom> pathwise;
};

// A_ij = f_ij / m_j when j is positive recurrent, 0 otherwise.
DenseMatrix cesaro_limit_matrix(const HittingMatrix& hitting,
                                const std::vector<double>& mean_return,
                                const std::vector<StateClass>& classification);

// o_j = sum_i mu0_i A_ij.
std::vector<double> average_occupation_limit(const DenseMatrix& cesaro, const Distribution& mu0);

// sum_j g(j) o_j; equals the positive-recurrent-only sum because o vanishes
// off the recurrent set.
double g_average_limit(const std::vector<double>& occupation, const SparseFunction& g);

// Exact law of the random limit sum_{j in C} g(j)/m_j 1{hit j}: one atom per
// closed class K with value sum_{j in K} g(j)/m_j and probability
// sum_i mu0_i h_i(K). Atoms with equal values (within 1e-12) are merged;
// result sorted by decreasing value.
std::vector<PathwiseAtom> pathwise_limit_distribution(const ClassStructure& structure,
                                                      const HittingMatrix& hitting,
                                                      const std::vector<double>& mean_return,
                                                      const Distribution& mu0,
                                                      const SparseFunction& g);

// Full pipeline: structure -> solves -> limits.
LimitReport limit_report(const ChainSpec& spec, const SolveOptions& opts = {},
                         bool transient_targets = false);

// Dense powering cap for the finite-n oracle.
inline constexpr std::size_t kDenseGuard = 4096;

// Pre-limit quantities at horizon n: (1/n) sum_{k=1..n} P^k and
// (1/n) sum_{k=1..n} mu^(k). Brute-force oracle for the limit matrix; the
// vector path propagates mu <- mu P in O(nnz) per step and the matrix path
// keeps the running power and its sum, multiplying by sparse rows of P.
struct FiniteCesaro {
  std::size_t n = 0;
  DenseMatrix matrix_average;
  std::vector<double> vector_average;
};

// Errors: DimensionGuard when N > kDenseGuard.
FiniteCesaro finite_cesaro(const StochasticMatrix& P, const Distribution& mu0, std::size_t n);

// Same computation snapshotted at several horizons in one pass; ns must be
// strictly increasing.
std::vector<FiniteCesaro> finite_cesaro_checkpoints(const StochasticMatrix& P,
                                                    const Distribution& mu0,
                                                    std::span<const std::size_t> ns);

}  // namespace ergode
