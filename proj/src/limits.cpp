#include "ergode/limits.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ergode/errors.hpp"

namespace ergode {

double max_abs_diff(const DenseMatrix& a, const DenseMatrix& b) {
  double out = 0.0;
  const std::size_t total = a.rows() * a.cols();
  for (std::size_t i = 0; i < total; ++i) out = std::max(out, std::abs(a.data()[i] - b.data()[i]));
  return out;
}

DenseMatrix multiply(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix out(a.rows(), b.cols(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t t = 0; t < a.cols(); ++t) {
      const double v = a(i, t);
      if (v == 0.0) continue;
      const double* brow = b.row_data(t);
      double* orow = out.row_data(i);
      for (std::size_t j = 0; j < b.cols(); ++j) orow[j] += v * brow[j];
    }
  }
  return out;
}

DenseMatrix identity_matrix(std::size_t n) {
  DenseMatrix out(n, n, 0.0);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

DenseMatrix cesaro_limit_matrix(const HittingMatrix& hitting,
                                const std::vector<double>& mean_return,
                                const std::vector<StateClass>& classification) {
  const std::size_t n = hitting.f.rows();
  DenseMatrix a(n, n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    if (classification[j] != StateClass::PositiveRecurrent) continue;  // 0 otherwise
    const double inv_m = 1.0 / mean_return[j];
    for (std::size_t i = 0; i < n; ++i) a(i, j) = hitting.f(i, j) * inv_m;
  }
  return a;
}

std::vector<double> average_occupation_limit(const DenseMatrix& cesaro, const Distribution& mu0) {
  std::vector<double> o(cesaro.cols(), 0.0);
  for (const auto& [i, w] : mu0.weights()) {
    const double* row = cesaro.row_data(i);
    for (std::size_t j = 0; j < cesaro.cols(); ++j) o[j] += w * row[j];
  }
  return o;
}

double g_average_limit(const std::vector<double>& occupation, const SparseFunction& g) {
  double total = 0.0;
  for (const auto& [j, gj] : g.values()) total += gj * occupation[j];
  return total;
}

std::vector<PathwiseAtom> pathwise_limit_distribution(const ClassStructure& structure,
                                                      const HittingMatrix& hitting,
                                                      const std::vector<double>& mean_return,
                                                      const Distribution& mu0,
                                                      const SparseFunction& g) {
  // One atom per closed class K: value sum_{j in K} g(j)/m_j, probability of
  // absorption into K from mu0. h_i(K) is read off any column of K.
  std::vector<PathwiseAtom> atoms;
  for (const auto& cls : structure.classes) {
    if (!cls.closed) continue;
    double value = 0.0;
    for (std::size_t j : cls.members) value += g.at(j) / mean_return[j];
    const std::size_t rep = cls.members.front();
    double prob = 0.0;
    for (const auto& [i, w] : mu0.weights()) prob += w * hitting.f(i, rep);
    atoms.push_back({value, prob});
  }

  std::sort(atoms.begin(), atoms.end(),
            [](const PathwiseAtom& a, const PathwiseAtom& b) { return a.value > b.value; });
  std::vector<PathwiseAtom> merged;
  constexpr double kMergeTol = 1e-12;
  for (const auto& atom : atoms) {
    if (!merged.empty() && std::abs(merged.back().value - atom.value) <= kMergeTol)
      merged.back().probability += atom.probability;
    else
      merged.push_back(atom);
  }
  return merged;
}

LimitReport limit_report(const ChainSpec& spec, const SolveOptions& opts, bool transient_targets) {
  LimitReport report;
  report.structure = communicating_classes(spec.P);
  const auto stationaries = class_stationaries(spec.P, report.structure, opts);
  report.mean_return = mean_return_times(stationaries, spec.space.size());
  report.hitting = hitting_probabilities(spec.P, report.structure, opts, transient_targets);
  report.cesaro =
      cesaro_limit_matrix(report.hitting, report.mean_return, report.structure.classification);
  report.occupation = average_occupation_limit(report.cesaro, spec.mu0);
  report.g_mean = g_average_limit(report.occupation, spec.g);
  report.pathwise = pathwise_limit_distribution(report.structure, report.hitting,
                                                report.mean_return, spec.mu0, spec.g);
  return report;
}

namespace {

void check_dense_guard(std::size_t n) {
  if (n > kDenseGuard) {
    std::ostringstream msg;
    msg << "finite_cesaro needs dense powering; N = " << n << " exceeds the cap " << kDenseGuard;
    fail(ErrorCode::DimensionGuard, msg.str());
  }
}

}  // namespace

std::vector<FiniteCesaro> finite_cesaro_checkpoints(const StochasticMatrix& P,
                                                    const Distribution& mu0,
                                                    std::span<const std::size_t> ns) {
  const std::size_t n_states = P.size();
  check_dense_guard(n_states);
  if (ns.empty()) return {};
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0 || (i > 0 && ns[i] <= ns[i - 1]))
      fail(ErrorCode::ParamOutOfRange, "checkpoints must be strictly increasing and >= 1");
  }

  // power = P^k as a dense matrix, updated in place; sums accumulate the
  // running totals. The vector path never touches the matrix: mu <- mu P costs
  // O(nnz) per step.
  DenseMatrix power = identity_matrix(n_states);
  DenseMatrix power_sum(n_states, n_states, 0.0);
  std::vector<double> mu(n_states, 0.0), mu_next(n_states, 0.0), mu_sum(n_states, 0.0);
  for (const auto& [i, w] : mu0.weights()) mu[i] = w;

  DenseMatrix power_next(n_states, n_states, 0.0);
  std::vector<FiniteCesaro> out;
  out.reserve(ns.size());
  std::size_t checkpoint = 0;

  const std::size_t last = ns.back();
  for (std::size_t k = 1; k <= last; ++k) {
    // power_next = power * P, exploiting sparse rows of P.
    std::fill(power_next.data(), power_next.data() + n_states * n_states, 0.0);
    for (std::size_t i = 0; i < n_states; ++i) {
      const double* prow = power.row_data(i);
      double* nrow = power_next.row_data(i);
      for (std::size_t t = 0; t < n_states; ++t) {
        const double v = prow[t];
        if (v == 0.0) continue;
        for (const auto& e : P.row(t)) nrow[e.col] += v * e.p;
      }
    }
    std::swap(power, power_next);
    for (std::size_t i = 0; i < n_states * n_states; ++i) power_sum.data()[i] += power.data()[i];

    std::fill(mu_next.begin(), mu_next.end(), 0.0);
    for (std::size_t t = 0; t < n_states; ++t) {
      const double v = mu[t];
      if (v == 0.0) continue;
      for (const auto& e : P.row(t)) mu_next[e.col] += v * e.p;
    }
    mu.swap(mu_next);
    for (std::size_t t = 0; t < n_states; ++t) mu_sum[t] += mu[t];

    if (k == ns[checkpoint]) {
      FiniteCesaro fc;
      fc.n = k;
      fc.matrix_average = power_sum;
      fc.vector_average = mu_sum;
      const double inv = 1.0 / static_cast<double>(k);
      for (std::size_t i = 0; i < n_states * n_states; ++i) fc.matrix_average.data()[i] *= inv;
      for (auto& v : fc.vector_average) v *= inv;
      out.push_back(std::move(fc));
      ++checkpoint;
    }
  }
  return out;
}

FiniteCesaro finite_cesaro(const StochasticMatrix& P, const Distribution& mu0, std::size_t n) {
  if (n == 0) fail(ErrorCode::ParamOutOfRange, "finite_cesaro requires n >= 1");
  const std::size_t ns[] = {n};
  auto results = finite_cesaro_checkpoints(P, mu0, ns);
  return std::move(results.front());
}

}  // namespace ergode
