#include "ergode/chain.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergode/errors.hpp"

namespace ergode {

StateSpace::StateSpace(std::vector<std::string> labels) : labels_(std::move(labels)) {
  if (labels_.empty()) fail(ErrorCode::EmptyStateSpace, "state space must contain at least one state");
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i].empty())
      fail(ErrorCode::EmptyStateSpace, "state labels must be non-empty strings");
    auto [it, inserted] = index_.emplace(labels_[i], i);
    if (!inserted) fail(ErrorCode::UnknownLabel, "duplicate state label '" + labels_[i] + "'");
  }
}

std::size_t StateSpace::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) fail(ErrorCode::UnknownLabel, "unknown state label '" + label + "'");
  return it->second;
}

namespace {

// Sums duplicate columns, drops exact zeros, rejects negatives/non-finite,
// sorts by column. Shared by rows, initial mass and g.
std::vector<MatrixEntry> clean_sparse(std::vector<MatrixEntry> entries, const std::string& what,
                                      bool reject_negative) {
  std::sort(entries.begin(), entries.end(),
            [](const MatrixEntry& a, const MatrixEntry& b) { return a.col < b.col; });
  std::vector<MatrixEntry> out;
  out.reserve(entries.size());
  for (const auto& e : entries) {
    if (!std::isfinite(e.p)) fail(ErrorCode::NonFiniteValue, what + " contains a non-finite value");
    if (reject_negative && e.p < 0.0) {
      std::ostringstream msg;
      msg << what << " has negative probability " << e.p;
      fail(ErrorCode::NegativeProbability, msg.str());
    }
    if (e.p == 0.0) continue;
    if (!out.empty() && out.back().col == e.col)
      out.back().p += e.p;
    else
      out.push_back(e);
  }
  return out;
}

double sparse_sum(const std::vector<MatrixEntry>& entries) {
  double s = 0.0;
  for (const auto& e : entries) s += e.p;
  return s;
}

}  // namespace

StochasticMatrix::StochasticMatrix(std::size_t n_states, std::vector<std::vector<MatrixEntry>> rows,
                                   double row_tol) {
  if (n_states == 0) fail(ErrorCode::EmptyStateSpace, "stochastic matrix needs at least one state");
  rows.resize(n_states);
  rows_.reserve(n_states);
  for (std::size_t i = 0; i < n_states; ++i) {
    std::ostringstream key;
    key << "row " << i;
    auto row = clean_sparse(std::move(rows[i]), key.str(), /*reject_negative=*/true);
    for (const auto& e : row) {
      if (e.col >= n_states) fail(ErrorCode::UnknownLabel, key.str() + " references a state index out of range");
    }
    const double sum = sparse_sum(row);
    if (!(std::abs(sum - 1.0) <= row_tol)) {
      std::ostringstream msg;
      msg << key.str() << " sums to " << sum << " (|sum-1| > " << row_tol << ")";
      fail(ErrorCode::RowSumError, msg.str());
    }
    // Renormalize exactly so solvers downstream see stochastic rows.
    for (auto& e : row) e.p /= sum;
    rows_.push_back(std::move(row));
  }
}

double StochasticMatrix::at(std::size_t i, std::size_t j) const {
  const auto& row = rows_.at(i);
  auto it = std::lower_bound(row.begin(), row.end(), j,
                             [](const MatrixEntry& e, std::size_t col) { return e.col < col; });
  return (it != row.end() && it->col == j) ? it->p : 0.0;
}

Distribution::Distribution(std::size_t n_states, std::vector<std::pair<std::size_t, double>> weights,
                           double tol)
    : n_states_(n_states) {
  if (n_states == 0) fail(ErrorCode::EmptyStateSpace, "distribution needs at least one state");
  std::vector<MatrixEntry> entries;
  entries.reserve(weights.size());
  for (const auto& [idx, w] : weights) entries.push_back({idx, w});
  auto cleaned = clean_sparse(std::move(entries), "initial distribution", /*reject_negative=*/true);
  for (const auto& e : cleaned) {
    if (e.col >= n_states)
      fail(ErrorCode::UnknownLabel, "initial distribution references a state index out of range");
  }
  const double mass = sparse_sum(cleaned);
  if (!(std::abs(mass - 1.0) <= tol)) {
    std::ostringstream msg;
    msg << "initial distribution mass is " << mass << " (|mass-1| > " << tol << ")";
    fail(ErrorCode::RowSumError, msg.str());
  }
  weights_.reserve(cleaned.size());
  for (const auto& e : cleaned) weights_.emplace_back(e.col, e.p / mass);
}

double Distribution::at(std::size_t index) const {
  auto it = std::lower_bound(weights_.begin(), weights_.end(), index,
                             [](const auto& w, std::size_t i) { return w.first < i; });
  return (it != weights_.end() && it->first == index) ? it->second : 0.0;
}

SparseFunction::SparseFunction(std::size_t n_states,
                               std::vector<std::pair<std::size_t, double>> values) {
  std::vector<MatrixEntry> entries;
  entries.reserve(values.size());
  for (const auto& [idx, v] : values) entries.push_back({idx, v});
  auto cleaned = clean_sparse(std::move(entries), "g", /*reject_negative=*/false);
  for (const auto& e : cleaned) {
    if (e.col >= n_states) fail(ErrorCode::UnknownLabel, "g references a state index out of range");
  }
  values_.reserve(cleaned.size());
  for (const auto& e : cleaned) values_.emplace_back(e.col, e.p);
}

double SparseFunction::at(std::size_t index) const {
  auto it = std::lower_bound(values_.begin(), values_.end(), index,
                             [](const auto& v, std::size_t i) { return v.first < i; });
  return (it != values_.end() && it->first == index) ? it->second : 0.0;
}

ChainSpec validate_chain(const RawChain& raw, double row_tol) {
  StateSpace space{raw.states};
  const std::size_t n = space.size();

  for (const auto& [from, _] : raw.transitions) {
    if (!space.contains(from)) fail(ErrorCode::UnknownLabel, "transition row for unknown state '" + from + "'");
  }

  // Check each row with its label before handing the matrix the dense form,
  // so errors name states the way the input file spelled them.
  std::vector<std::vector<MatrixEntry>> rows(n);
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& from = space.label(i);
    double sum = 0.0;
    auto it = raw.transitions.find(from);
    if (it != raw.transitions.end()) {
      for (const auto& [to, p] : it->second) {
        if (!std::isfinite(p))
          fail(ErrorCode::NonFiniteValue, "row '" + from + "' contains a non-finite value");
        if (p < 0.0) {
          std::ostringstream msg;
          msg << "row '" << from << "' has negative probability " << p << " to '" << to << "'";
          fail(ErrorCode::NegativeProbability, msg.str());
        }
        rows[i].push_back({space.index_of(to), p});
        sum += p;
      }
    }
    if (!(std::abs(sum - 1.0) <= row_tol)) {
      std::ostringstream msg;
      msg << "row '" << from << "' sums to " << sum << " (|sum-1| > " << row_tol << ")";
      fail(ErrorCode::RowSumError, msg.str());
    }
  }
  StochasticMatrix P(n, std::move(rows), row_tol);

  std::vector<std::pair<std::size_t, double>> mu0;
  mu0.reserve(raw.initial.size());
  for (const auto& [label, w] : raw.initial) mu0.emplace_back(space.index_of(label), w);

  std::vector<std::pair<std::size_t, double>> g;
  g.reserve(raw.g.size());
  for (const auto& [label, v] : raw.g) g.emplace_back(space.index_of(label), v);

  return ChainSpec{std::move(space), std::move(P), Distribution(n, std::move(mu0), row_tol),
                   SparseFunction(n, std::move(g))};
}

RawChain to_raw(const ChainSpec& spec) {
  RawChain raw;
  raw.states = spec.space.labels();
  for (std::size_t i = 0; i < spec.space.size(); ++i) {
    auto& row = raw.transitions[spec.space.label(i)];
    for (const auto& e : spec.P.row(i)) row[spec.space.label(e.col)] = e.p;
  }
  for (const auto& [idx, w] : spec.mu0.weights()) raw.initial[spec.space.label(idx)] = w;
  for (const auto& [idx, v] : spec.g.values()) raw.g[spec.space.label(idx)] = v;
  return raw;
}

}  // namespace ergode
