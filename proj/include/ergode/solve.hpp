#pragma once

#include <cstddef>
#include <vector>

#include "ergode/chain.hpp"
#include "ergode/dense_matrix.hpp"
#include "ergode/structure.hpp"

namespace ergode {

struct SolveOptions {
  double solve_tol = 1e-10;
  // Linear systems at or below this size go through a dense LU with partial
  // pivoting; larger systems use damped fixed-point iteration on (I+P)/2,
  // which converges regardless of periodicity.
  std::size_t direct_cutoff = 2048;
  std::size_t max_iters = 1000000;
};

// Stationary law of one closed class together with the mean return times
// m_j = 1/pi_j of its members.
struct ClassStationary {
  std::size_t class_id = 0;
  std::vector<std::size_t> members;  // state indices, increasing
  std::vector<double> pi;            // aligned with members; positive, sums to 1
  std::vector<double> m;             // aligned with members; m = 1/pi
};

// Unique pi with pi = pi P on a closed class, all entries positive. Errors:
// SingularSystem, NoConvergence.
std::vector<double> stationary_distribution(const StochasticMatrix& P, const CommClass& cls,
                                            const SolveOptions& opts = {});

std::vector<ClassStationary> class_stationaries(const StochasticMatrix& P,
                                                const ClassStructure& structure,
                                                const SolveOptions& opts = {});

// Per-state mean return times: m_j = 1/pi_j for closed-class states, +infinity
// for transient states (never revisited in mean for finite chains).
std::vector<double> mean_return_times(const std::vector<ClassStationary>& stationaries,
                                      std::size_t n_states);

// Absorption probabilities h_i(K) from each transient state into each closed
// class, from the first-step system over the transient block (one shared
// factorization, one right-hand side per class).
struct AbsorptionTable {
  std::vector<std::size_t> transient_states;  // row order, increasing state index
  std::vector<std::size_t> closed_classes;    // column order, class ids
  DenseMatrix h;                              // |transient| x |closed classes|
};

AbsorptionTable absorption_probabilities(const StochasticMatrix& P,
                                         const ClassStructure& structure,
                                         const SolveOptions& opts = {});

// f_ij = P(ever hit j | start i). Columns for transient targets are solved on
// demand only (transient_targets flag); they contribute nothing to any limit.
struct HittingMatrix {
  DenseMatrix f;                  // N x N
  std::vector<bool> column_valid; // false for transient columns unless requested
  bool transient_targets = false;
};

HittingMatrix hitting_probabilities(const StochasticMatrix& P, const ClassStructure& structure,
                                    const SolveOptions& opts = {}, bool transient_targets = false);

}  // namespace ergode
