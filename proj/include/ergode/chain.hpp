#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace ergode {

// Rows (and the initial mass) whose sum is within this tolerance of 1 are
// renormalized exactly on ingestion, so downstream solvers see exact
// stochasticity instead of stacked tolerances.
inline constexpr double kDefaultRowTol = 1e-9;

// Ordered set of unique state labels; all computation downstream runs on the
// dense indices 0..N-1.
class StateSpace {
 public:
  explicit StateSpace(std::vector<std::string> labels);

  std::size_t size() const noexcept { return labels_.size(); }
  const std::string& label(std::size_t index) const { return labels_.at(index); }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  bool contains(const std::string& label) const { return index_.count(label) > 0; }
  // Throws UnknownLabel.
  std::size_t index_of(const std::string& label) const;

  bool operator==(const StateSpace& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct MatrixEntry {
  std::size_t col;
  double p;
  bool operator==(const MatrixEntry&) const = default;
};

// Sparse row-stochastic transition kernel. Each row stores strictly positive
// entries in increasing column order; zeros are never stored.
class StochasticMatrix {
 public:
  // Validates and renormalizes. Entries may arrive in any order; duplicates of
  // the same column are summed.
  StochasticMatrix(std::size_t n_states, std::vector<std::vector<MatrixEntry>> rows,
                   double row_tol = kDefaultRowTol);

  std::size_t size() const noexcept { return rows_.size(); }
  const std::vector<MatrixEntry>& row(std::size_t i) const { return rows_.at(i); }
  double at(std::size_t i, std::size_t j) const;

  bool operator==(const StochasticMatrix& other) const { return rows_ == other.rows_; }

 private:
  std::vector<std::vector<MatrixEntry>> rows_;
};

// Sparse probability distribution over state indices; total mass 1.
class Distribution {
 public:
  Distribution(std::size_t n_states, std::vector<std::pair<std::size_t, double>> weights,
               double tol = kDefaultRowTol);

  std::size_t n_states() const noexcept { return n_states_; }
  // Sorted by state index, strictly positive weights, sums to 1.
  const std::vector<std::pair<std::size_t, double>>& weights() const noexcept { return weights_; }
  double at(std::size_t index) const;

  bool operator==(const Distribution& other) const = default;

 private:
  std::size_t n_states_ = 0;
  std::vector<std::pair<std::size_t, double>> weights_;
};

// Finite-support real function on state indices; absent states map to 0.
// Finite support keeps sum_j |g(j)| finite by construction.
class SparseFunction {
 public:
  SparseFunction() = default;
  SparseFunction(std::size_t n_states, std::vector<std::pair<std::size_t, double>> values);

  bool empty() const noexcept { return values_.empty(); }
  const std::vector<std::pair<std::size_t, double>>& values() const noexcept { return values_; }
  double at(std::size_t index) const;

  bool operator==(const SparseFunction& other) const { return values_ == other.values_; }

 private:
  std::vector<std::pair<std::size_t, double>> values_;
};

// Label-keyed chain description as parsed from a file or assembled by hand;
// the unvalidated input to validate_chain.
struct RawChain {
  std::vector<std::string> states;
  std::map<std::string, std::map<std::string, double>> transitions;
  std::map<std::string, double> initial;
  std::map<std::string, double> g;  // empty map = g absent (zero function)
};

struct ChainSpec {
  StateSpace space;
  StochasticMatrix P;
  Distribution mu0;
  SparseFunction g;

  bool operator==(const ChainSpec& other) const = default;
};

// Checks labels, signs and row/initial mass against row_tol, then builds the
// validated spec. Errors: EmptyStateSpace, UnknownLabel, NegativeProbability,
// RowSumError, NonFiniteValue.
ChainSpec validate_chain(const RawChain& raw, double row_tol = kDefaultRowTol);

// Inverse of validate_chain up to renormalization; validate_chain(to_raw(s))
// equals s for any valid s (idempotence).
RawChain to_raw(const ChainSpec& spec);

}  // namespace ergode
