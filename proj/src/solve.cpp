#include "ergode/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <unordered_map>

#include <Eigen/Dense>

#include "ergode/errors.hpp"

namespace ergode {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

std::unordered_map<std::size_t, std::size_t> local_index(const std::vector<std::size_t>& states) {
  std::unordered_map<std::size_t, std::size_t> map;
  map.reserve(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) map[states[i]] = i;
  return map;
}

// Max-norm residual of the balance equations pi = pi P on the class.
double balance_residual(const StochasticMatrix& P, const std::vector<std::size_t>& members,
                        const std::unordered_map<std::size_t, std::size_t>& local,
                        const std::vector<double>& pi) {
  std::vector<double> next(members.size(), 0.0);
  for (std::size_t a = 0; a < members.size(); ++a) {
    for (const auto& e : P.row(members[a])) {
      auto it = local.find(e.col);
      if (it != local.end()) next[it->second] += pi[a] * e.p;
    }
  }
  double resid = 0.0;
  for (std::size_t a = 0; a < members.size(); ++a) resid = std::max(resid, std::abs(next[a] - pi[a]));
  return resid;
}

std::vector<double> stationary_direct(const StochasticMatrix& P,
                                      const std::vector<std::size_t>& members,
                                      const std::unordered_map<std::size_t, std::size_t>& local) {
  const std::size_t k = members.size();
  // (P^T - I) pi = 0 with the last balance equation replaced by sum(pi) = 1.
  MatrixXd A = MatrixXd::Zero(k, k);
  for (std::size_t a = 0; a < k; ++a) {
    for (const auto& e : P.row(members[a])) {
      auto it = local.find(e.col);
      if (it != local.end()) A(it->second, a) += e.p;
    }
    A(a, a) -= 1.0;
  }
  A.row(k - 1).setOnes();
  VectorXd b = VectorXd::Zero(k);
  b(k - 1) = 1.0;

  VectorXd pi = Eigen::PartialPivLU<MatrixXd>(A).solve(b);

  std::vector<double> out(k);
  double sum = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    out[a] = pi(a);
    sum += pi(a);
  }
  if (!std::isfinite(sum) || sum <= 0.0)
    fail(ErrorCode::SingularSystem, "stationary solve produced a degenerate vector");
  for (auto& v : out) v /= sum;
  return out;
}

std::vector<double> stationary_iterative(const StochasticMatrix& P,
                                         const std::vector<std::size_t>& members,
                                         const std::unordered_map<std::size_t, std::size_t>& local,
                                         const SolveOptions& opts) {
  const std::size_t k = members.size();
  std::vector<double> pi(k, 1.0 / static_cast<double>(k)), next(k, 0.0);
  // Damped fixed point on the lazy kernel (I+P)/2; periodicity cannot stall it.
  for (std::size_t iter = 0; iter < opts.max_iters; ++iter) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t a = 0; a < k; ++a) {
      next[a] += 0.5 * pi[a];
      for (const auto& e : P.row(members[a])) {
        auto it = local.find(e.col);
        if (it != local.end()) next[it->second] += 0.5 * pi[a] * e.p;
      }
    }
    double mass = 0.0, diff = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      diff = std::max(diff, std::abs(next[a] - pi[a]));
      mass += next[a];
    }
    for (auto& v : next) v /= mass;
    pi.swap(next);
    if (diff < opts.solve_tol) return pi;
  }
  fail(ErrorCode::NoConvergence, "stationary iteration exceeded max_iters");
}

}  // namespace

std::vector<double> stationary_distribution(const StochasticMatrix& P, const CommClass& cls,
                                            const SolveOptions& opts) {
  if (!cls.closed)
    fail(ErrorCode::SingularSystem, "stationary_distribution requires a closed class");
  const auto& members = cls.members;
  if (members.size() == 1) return {1.0};

  const auto local = local_index(members);
  std::vector<double> pi = members.size() <= opts.direct_cutoff
                               ? stationary_direct(P, members, local)
                               : stationary_iterative(P, members, local, opts);

  const double resid = balance_residual(P, members, local, pi);
  double min_pi = 1.0;
  for (double v : pi) min_pi = std::min(min_pi, v);
  if (!(resid < std::max(opts.solve_tol, 1e-12)) || min_pi <= 0.0) {
    std::ostringstream msg;
    msg << "stationary solve residual " << resid << " on class " << cls.id
        << " (min entry " << min_pi << ")";
    fail(ErrorCode::SingularSystem, msg.str());
  }
  return pi;
}

std::vector<ClassStationary> class_stationaries(const StochasticMatrix& P,
                                                const ClassStructure& structure,
                                                const SolveOptions& opts) {
  std::vector<ClassStationary> out;
  for (const auto& cls : structure.classes) {
    if (!cls.closed) continue;
    ClassStationary cs;
    cs.class_id = cls.id;
    cs.members = cls.members;
    cs.pi = stationary_distribution(P, cls, opts);
    cs.m.reserve(cs.pi.size());
    for (double p : cs.pi) cs.m.push_back(1.0 / p);
    out.push_back(std::move(cs));
  }
  return out;
}

std::vector<double> mean_return_times(const std::vector<ClassStationary>& stationaries,
                                      std::size_t n_states) {
  std::vector<double> m(n_states, std::numeric_limits<double>::infinity());
  for (const auto& cs : stationaries)
    for (std::size_t a = 0; a < cs.members.size(); ++a) m[cs.members[a]] = cs.m[a];
  return m;
}

namespace {

double snap_unit(double v, double tol) {
  if (std::abs(v) <= tol) return 0.0;
  if (std::abs(v - 1.0) <= tol) return 1.0;
  return std::clamp(v, 0.0, 1.0);
}

}  // namespace

AbsorptionTable absorption_probabilities(const StochasticMatrix& P,
                                         const ClassStructure& structure,
                                         const SolveOptions& opts) {
  AbsorptionTable table;
  table.closed_classes = structure.closed_class_ids();
  for (std::size_t v = 0; v < structure.n_states(); ++v)
    if (!structure.classes[structure.class_of[v]].closed) table.transient_states.push_back(v);

  const std::size_t nt = table.transient_states.size();
  const std::size_t nc = table.closed_classes.size();
  table.h = DenseMatrix(nt, nc, 0.0);
  if (nt == 0) return table;

  std::unordered_map<std::size_t, std::size_t> class_col;
  for (std::size_t c = 0; c < nc; ++c) class_col[table.closed_classes[c]] = c;
  const auto local = local_index(table.transient_states);

  // First-step system h = Q h + R over the transient block; one factorization,
  // one right-hand side per closed class.
  MatrixXd R = MatrixXd::Zero(nt, nc);
  for (std::size_t a = 0; a < nt; ++a) {
    for (const auto& e : P.row(table.transient_states[a])) {
      if (local.count(e.col)) continue;
      R(a, class_col.at(structure.class_of[e.col])) += e.p;
    }
  }

  MatrixXd H;
  if (nt <= opts.direct_cutoff) {
    MatrixXd ImQ = MatrixXd::Identity(nt, nt);
    for (std::size_t a = 0; a < nt; ++a) {
      for (const auto& e : P.row(table.transient_states[a])) {
        auto it = local.find(e.col);
        if (it != local.end()) ImQ(a, it->second) -= e.p;
      }
    }
    Eigen::PartialPivLU<MatrixXd> lu(ImQ);
    H = lu.solve(R);
    const double resid = (ImQ * H - R).cwiseAbs().maxCoeff();
    if (!(resid < std::max(opts.solve_tol, 1e-12))) {
      std::ostringstream msg;
      msg << "absorption solve residual " << resid;
      fail(ErrorCode::SingularSystem, msg.str());
    }
  } else {
    H = MatrixXd::Zero(nt, nc);
    MatrixXd next(nt, nc);
    bool converged = false;
    for (std::size_t iter = 0; iter < opts.max_iters && !converged; ++iter) {
      next = R;
      for (std::size_t a = 0; a < nt; ++a) {
        for (const auto& e : P.row(table.transient_states[a])) {
          auto it = local.find(e.col);
          if (it != local.end()) next.row(a) += e.p * H.row(it->second);
        }
      }
      converged = (next - H).cwiseAbs().maxCoeff() < opts.solve_tol;
      H.swap(next);
    }
    if (!converged) fail(ErrorCode::NoConvergence, "absorption iteration exceeded max_iters");
  }

  for (std::size_t a = 0; a < nt; ++a)
    for (std::size_t c = 0; c < nc; ++c) table.h(a, c) = snap_unit(H(a, c), opts.solve_tol);
  return table;
}

namespace {

// Hitting probabilities of one transient target j: first-step system with j
// absorbing, restricted to the states that reach j.
void solve_transient_target(const StochasticMatrix& P, const std::vector<std::vector<std::size_t>>& rev,
                            std::size_t j, const SolveOptions& opts, DenseMatrix& f) {
  const std::size_t n = P.size();
  // Reverse reachability from j, excluding j itself.
  std::vector<bool> reaches(n, false);
  std::vector<std::size_t> queue{j};
  while (!queue.empty()) {
    const std::size_t v = queue.back();
    queue.pop_back();
    for (std::size_t u : rev[v]) {
      if (!reaches[u]) {
        reaches[u] = true;
        queue.push_back(u);
      }
    }
  }
  reaches[j] = false;

  std::vector<std::size_t> states;
  for (std::size_t v = 0; v < n; ++v)
    if (reaches[v]) states.push_back(v);

  std::vector<double> u(states.size(), 0.0);
  if (!states.empty()) {
    const auto local = local_index(states);
    const std::size_t k = states.size();
    if (k <= opts.direct_cutoff) {
      MatrixXd A = MatrixXd::Identity(k, k);
      VectorXd b = VectorXd::Zero(k);
      for (std::size_t a = 0; a < k; ++a) {
        for (const auto& e : P.row(states[a])) {
          if (e.col == j) {
            b(a) += e.p;
            continue;
          }
          auto it = local.find(e.col);
          if (it != local.end()) A(a, it->second) -= e.p;
        }
      }
      VectorXd x = Eigen::PartialPivLU<MatrixXd>(A).solve(b);
      const double resid = (A * x - b).cwiseAbs().maxCoeff();
      if (!(resid < std::max(opts.solve_tol, 1e-12))) {
        std::ostringstream msg;
        msg << "hitting solve residual " << resid << " for target " << j;
        fail(ErrorCode::SingularSystem, msg.str());
      }
      for (std::size_t a = 0; a < k; ++a) u[a] = x(a);
    } else {
      std::vector<double> next(k, 0.0);
      bool converged = false;
      for (std::size_t iter = 0; iter < opts.max_iters && !converged; ++iter) {
        double diff = 0.0;
        for (std::size_t a = 0; a < k; ++a) {
          double acc = 0.0;
          for (const auto& e : P.row(states[a])) {
            if (e.col == j) {
              acc += e.p;
              continue;
            }
            auto it = local.find(e.col);
            if (it != local.end()) acc += e.p * u[it->second];
          }
          next[a] = acc;
          diff = std::max(diff, std::abs(acc - u[a]));
        }
        u.swap(next);
        converged = diff < opts.solve_tol;
      }
      if (!converged) fail(ErrorCode::NoConvergence, "hitting iteration exceeded max_iters");
    }
    for (std::size_t a = 0; a < states.size(); ++a) f(states[a], j) = snap_unit(u[a], opts.solve_tol);
  }

  // Return probability of j itself: one step, then hit j from wherever.
  double fjj = 0.0;
  for (const auto& e : P.row(j)) {
    if (e.col == j)
      fjj += e.p;
    else if (reaches[e.col])
      fjj += e.p * f(e.col, j);
  }
  f(j, j) = snap_unit(fjj, opts.solve_tol);
}

}  // namespace

HittingMatrix hitting_probabilities(const StochasticMatrix& P, const ClassStructure& structure,
                                    const SolveOptions& opts, bool transient_targets) {
  const std::size_t n = P.size();
  HittingMatrix out;
  out.f = DenseMatrix(n, n, 0.0);
  out.column_valid.assign(n, false);
  out.transient_targets = transient_targets;

  const AbsorptionTable table = absorption_probabilities(P, structure, opts);
  std::unordered_map<std::size_t, std::size_t> class_col;
  for (std::size_t c = 0; c < table.closed_classes.size(); ++c)
    class_col[table.closed_classes[c]] = c;

  for (const auto& cls : structure.classes) {
    if (!cls.closed) continue;
    const std::size_t col = class_col.at(cls.id);
    for (std::size_t j : cls.members) {
      out.column_valid[j] = true;
      for (std::size_t i : cls.members) out.f(i, j) = 1.0;  // shared closed class
      for (std::size_t a = 0; a < table.transient_states.size(); ++a)
        out.f(table.transient_states[a], j) = table.h(a, col);
      // i in a different closed class stays 0.
    }
  }

  if (transient_targets) {
    std::vector<std::vector<std::size_t>> rev(n);
    for (std::size_t v = 0; v < n; ++v)
      for (const auto& e : P.row(v)) rev[e.col].push_back(v);
    for (std::size_t j : table.transient_states) {
      solve_transient_target(P, rev, j, opts, out.f);
      out.column_valid[j] = true;
    }
  }
  return out;
}

}  // namespace ergode
