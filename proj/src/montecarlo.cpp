#include "ergode/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <thread>

#include "ergode/errors.hpp"
#include "ergode/rng.hpp"

namespace ergode {

unsigned resolve_threads(unsigned requested) {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  unsigned out = requested == 0 ? hw : requested;
  if (const char* env = std::getenv("ERGODE_THREADS")) {
    char* end = nullptr;
    const unsigned long cap = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0' && cap > 0)
      out = static_cast<unsigned>(std::min<unsigned long>(out, cap));
  }
  return std::max(1u, out);
}

namespace {

// Paths are processed in fixed chunks and partial aggregates are merged in
// chunk order, so the result is bit-identical for any thread count.
constexpr std::size_t kChunkPaths = 1024;

template <class Body>
void run_chunked(std::size_t paths, unsigned threads, Body&& body) {
  const std::size_t n_chunks = (paths + kChunkPaths - 1) / kChunkPaths;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n_chunks));
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c)
      body(c, c * kChunkPaths, std::min(paths, (c + 1) * kChunkPaths));
    return;
  }
  std::atomic<std::size_t> next{0};
  auto drain = [&] {
    for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1))
      body(c, c * kChunkPaths, std::min(paths, (c + 1) * kChunkPaths));
  };
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) pool.emplace_back(drain);
  for (auto& th : pool) th.join();
}

std::int64_t draw_initial(const Distribution& mu0, Xoshiro256PlusPlus& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  for (const auto& [state, w] : mu0.weights()) {
    cum += w;
    if (u < cum) return static_cast<std::int64_t>(state);
  }
  return static_cast<std::int64_t>(mu0.weights().back().first);
}

// One transition of a finite chain: inverse CDF over the sparse row in stored
// column order.
struct FiniteStepper {
  const StochasticMatrix* P;
  std::int64_t operator()(std::int64_t state, Xoshiro256PlusPlus& rng) const {
    const auto& row = P->row(static_cast<std::size_t>(state));
    const double u = rng.uniform();
    double cum = 0.0;
    for (const auto& e : row) {
      cum += e.p;
      if (u < cum) return static_cast<std::int64_t>(e.col);
    }
    return static_cast<std::int64_t>(row.back().col);
  }
};

struct GeneratorStepper {
  const GeneratorChain* chain;
  std::int64_t operator()(std::int64_t state, Xoshiro256PlusPlus& rng) const {
    return chain->step(state, rng.uniform());
  }
};

template <class Init, class Step>
TrajectoryStats trace_path(std::size_t n, std::uint64_t seed, std::uint64_t path_index,
                           std::int64_t target, Init&& init, Step&& step,
                           const std::function<double(std::int64_t)>& g_of) {
  Xoshiro256PlusPlus rng(seed, path_index);
  std::int64_t state = init(rng);
  TrajectoryStats out;
  out.n = n;
  out.target = target;
  bool hit = false;
  std::size_t last_visit = 0;
  double g_sum = 0.0;
  for (std::size_t k = 1; k <= n; ++k) {
    state = step(state, rng);
    ++out.occupation[state];
    out.first_passage.emplace(state, static_cast<std::int64_t>(k));
    g_sum += g_of(state);
    if (state == target) {
      if (hit) out.gaps.push_back(static_cast<std::int64_t>(k - last_visit));
      hit = true;
      last_visit = k;
    }
  }
  out.g_running = n == 0 ? 0.0 : g_sum / static_cast<double>(n);
  return out;
}

void check_config(const ExperimentConfig& config) {
  if (config.n < 1) fail(ErrorCode::ParamOutOfRange, "horizon n must be >= 1");
  if (config.paths < 1) fail(ErrorCode::ParamOutOfRange, "paths must be >= 1");
  if (config.band && !(*config.band > 0.0))
    fail(ErrorCode::ParamOutOfRange, "band must be positive");
}

double default_band(bool positive_recurrent, double m) {
  if (positive_recurrent) return std::min(1.0 / (2.0 * m), 0.05);
  return 0.05;
}

double binomial_stderr(double p, std::size_t paths) {
  return std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(paths));
}

// What the convergence runner accumulates; merged additively in chunk order.
struct ConvergencePartial {
  std::int64_t near_m = 0;
  std::int64_t near_zero = 0;
  std::int64_t hit = 0;
  double frac_sum = 0.0;
  double frac_sq = 0.0;
  std::uint64_t gap_count = 0;
  double gap_sum = 0.0;
  double gap_sq = 0.0;
};

template <class Init, class Step>
ExperimentSummary run_convergence(const ExperimentConfig& config, std::int64_t target,
                                  bool positive_recurrent, double m,
                                  std::optional<double> predicted_hit_mass, Init&& init,
                                  Step&& step) {
  check_config(config);
  const std::size_t n = config.n;
  const std::size_t paths = config.paths;
  const double band = config.band ? *config.band : default_band(positive_recurrent, m);
  const double inv_m = positive_recurrent ? 1.0 / m : 0.0;
  const double inv_n = 1.0 / static_cast<double>(n);

  std::vector<ConvergencePartial> partials((paths + kChunkPaths - 1) / kChunkPaths);
  run_chunked(paths, config.threads, [&](std::size_t chunk, std::size_t first, std::size_t last) {
    ConvergencePartial agg;
    for (std::size_t p = first; p < last; ++p) {
      Xoshiro256PlusPlus rng(config.seed, p);
      std::int64_t state = init(rng);
      std::int64_t visits = 0;
      bool hit = false;
      std::size_t last_visit = 0;
      for (std::size_t k = 1; k <= n; ++k) {
        state = step(state, rng);
        if (state == target) {
          ++visits;
          if (hit) {
            const double z = static_cast<double>(k - last_visit);
            ++agg.gap_count;
            agg.gap_sum += z;
            agg.gap_sq += z * z;
          }
          hit = true;
          last_visit = k;
        }
      }
      const double frac = static_cast<double>(visits) * inv_n;
      agg.frac_sum += frac;
      agg.frac_sq += frac * frac;
      if (hit) ++agg.hit;
      if (positive_recurrent && std::abs(frac - inv_m) < band) ++agg.near_m;
      if (frac < band) ++agg.near_zero;
    }
    partials[chunk] = agg;
  });

  ConvergencePartial total;
  for (const auto& part : partials) {
    total.near_m += part.near_m;
    total.near_zero += part.near_zero;
    total.hit += part.hit;
    total.frac_sum += part.frac_sum;
    total.frac_sq += part.frac_sq;
    total.gap_count += part.gap_count;
    total.gap_sum += part.gap_sum;
    total.gap_sq += part.gap_sq;
  }

  ExperimentSummary out;
  out.paths = paths;
  out.horizon = n;
  out.target = target;
  out.band = band;
  out.inverse_m = inv_m;
  const double np = static_cast<double>(paths);
  out.frac_near_inverse_m = static_cast<double>(total.near_m) / np;
  out.frac_near_zero = static_cast<double>(total.near_zero) / np;
  out.frac_hit = static_cast<double>(total.hit) / np;
  out.stderr_near_inverse_m = binomial_stderr(out.frac_near_inverse_m, paths);
  out.stderr_near_zero = binomial_stderr(out.frac_near_zero, paths);
  out.stderr_hit = binomial_stderr(out.frac_hit, paths);
  out.predicted_hit_mass = predicted_hit_mass;
  out.mean_occupation_fraction = total.frac_sum / np;
  if (paths > 1) {
    const double var =
        std::max(0.0, (total.frac_sq - np * out.mean_occupation_fraction *
                                           out.mean_occupation_fraction) /
                          (np - 1.0));
    out.stderr_occupation_fraction = std::sqrt(var / np);
  }
  out.total_gaps = total.gap_count;
  if (total.gap_count >= 1) {
    const double ng = static_cast<double>(total.gap_count);
    const double mean_gap = total.gap_sum / ng;
    out.mean_gap = mean_gap;
    if (total.gap_count >= 2) {
      const double var = std::max(0.0, (total.gap_sq - ng * mean_gap * mean_gap) / (ng - 1.0));
      out.stderr_gap = std::sqrt(var / ng);
    }
  }
  out.seed = config.seed;
  out.rng_name = Xoshiro256PlusPlus::kName;
  return out;
}

template <class Init, class Step, class GOf>
ErgodicAverageResult run_ergodic_average(const ExperimentConfig& config, Init&& init, Step&& step,
                                         GOf&& g_of) {
  check_config(config);
  const std::size_t n = config.n;
  const std::size_t paths = config.paths;
  const double inv_n = 1.0 / static_cast<double>(n);

  ErgodicAverageResult out;
  out.paths = paths;
  out.horizon = n;
  out.band = config.band ? *config.band : 0.05;
  out.seed = config.seed;
  out.rng_name = Xoshiro256PlusPlus::kName;
  out.per_path.assign(paths, 0.0);

  run_chunked(paths, config.threads, [&](std::size_t, std::size_t first, std::size_t last) {
    for (std::size_t p = first; p < last; ++p) {
      Xoshiro256PlusPlus rng(config.seed, p);
      std::int64_t state = init(rng);
      double g_sum = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        state = step(state, rng);
        g_sum += g_of(state);
      }
      out.per_path[p] = g_sum * inv_n;
    }
  });

  double mean = 0.0;
  for (const double v : out.per_path) mean += v;
  out.mean = mean / static_cast<double>(paths);

  // Single-linkage clustering at radius band: sort ascending, cut where the
  // gap between neighbours exceeds band, then report clusters by decreasing
  // centre to line up with pathwise_limit_distribution.
  std::vector<double> sorted = out.per_path;
  std::sort(sorted.begin(), sorted.end());
  std::size_t begin = 0;
  for (std::size_t i = 1; i <= sorted.size(); ++i) {
    if (i == sorted.size() || sorted[i] - sorted[i - 1] > out.band) {
      ErgodicAverageResult::Cluster cluster;
      cluster.count = i - begin;
      double sum = 0.0;
      for (std::size_t t = begin; t < i; ++t) sum += sorted[t];
      cluster.center = sum / static_cast<double>(cluster.count);
      cluster.mass = static_cast<double>(cluster.count) / static_cast<double>(paths);
      out.clusters.push_back(cluster);
      begin = i;
    }
  }
  std::reverse(out.clusters.begin(), out.clusters.end());
  return out;
}

std::int64_t checked_target(const ChainSpec& chain, std::int64_t target) {
  if (target < 0 || static_cast<std::size_t>(target) >= chain.space.size())
    fail(ErrorCode::UnknownLabel,
         "target index " + std::to_string(target) + " outside the state space");
  return target;
}

}  // namespace

TrajectoryStats sample_path(const ChainSpec& chain, std::size_t n, std::uint64_t seed,
                            std::uint64_t path_index, std::int64_t target) {
  checked_target(chain, target);
  std::vector<double> g_dense(chain.space.size(), 0.0);
  for (const auto& [j, v] : chain.g.values()) g_dense[j] = v;
  return trace_path(
      n, seed, path_index, target, [&](Xoshiro256PlusPlus& rng) { return draw_initial(chain.mu0, rng); },
      FiniteStepper{&chain.P},
      [&](std::int64_t s) { return g_dense[static_cast<std::size_t>(s)]; });
}

TrajectoryStats sample_path(const GeneratorChain& chain, std::size_t n, std::uint64_t seed,
                            std::uint64_t path_index, std::int64_t target,
                            const std::map<std::int64_t, double>& g) {
  return trace_path(
      n, seed, path_index, target, [&](Xoshiro256PlusPlus&) { return chain.start; },
      GeneratorStepper{&chain},
      [&](std::int64_t s) {
        const auto it = g.find(s);
        return it == g.end() ? 0.0 : it->second;
      });
}

ExperimentSummary convergence_experiment(const ChainSpec& chain, std::int64_t target,
                                         const ExperimentConfig& config,
                                         const SolveOptions& opts) {
  checked_target(chain, target);
  const auto j = static_cast<std::size_t>(target);
  const auto structure = communicating_classes(chain.P);
  const auto stationaries = class_stationaries(chain.P, structure, opts);
  const auto mean_return = mean_return_times(stationaries, chain.space.size());
  const bool pr = structure.classification[j] == StateClass::PositiveRecurrent;
  const bool transient_target = structure.classification[j] == StateClass::Transient;
  const auto hitting = hitting_probabilities(chain.P, structure, opts, transient_target);
  double predicted = 0.0;
  for (const auto& [i, w] : chain.mu0.weights()) predicted += w * hitting.f(i, j);

  return run_convergence(
      config, target, pr, pr ? mean_return[j] : 0.0, predicted,
      [&](Xoshiro256PlusPlus& rng) { return draw_initial(chain.mu0, rng); },
      FiniteStepper{&chain.P});
}

ExperimentSummary convergence_experiment(const GeneratorChain& chain,
                                         const ExperimentConfig& config) {
  const bool pr = chain.declared_class_of_target == StateClass::PositiveRecurrent;
  double m = 0.0;
  if (pr) {
    if (!chain.analytic.m_target)
      fail(ErrorCode::MissingMeanReturnTime,
           "family '" + chain.family_name +
               "' declares a positive recurrent target but no mean return time");
    m = *chain.analytic.m_target;
  }
  return run_convergence(
      config, chain.target, pr, m, chain.analytic.f_start_target,
      [&](Xoshiro256PlusPlus&) { return chain.start; }, GeneratorStepper{&chain});
}

ErgodicAverageResult ergodic_average_experiment(const ChainSpec& chain,
                                                const ExperimentConfig& config) {
  std::vector<double> g_dense(chain.space.size(), 0.0);
  for (const auto& [j, v] : chain.g.values()) g_dense[j] = v;
  return run_ergodic_average(
      config, [&](Xoshiro256PlusPlus& rng) { return draw_initial(chain.mu0, rng); },
      FiniteStepper{&chain.P},
      [&](std::int64_t s) { return g_dense[static_cast<std::size_t>(s)]; });
}

ErgodicAverageResult ergodic_average_experiment(const GeneratorChain& chain,
                                                const std::map<std::int64_t, double>& g,
                                                const ExperimentConfig& config) {
  return run_ergodic_average(
      config, [&](Xoshiro256PlusPlus&) { return chain.start; }, GeneratorStepper{&chain},
      [&](std::int64_t s) {
        const auto it = g.find(s);
        return it == g.end() ? 0.0 : it->second;
      });
}

}  // namespace ergode
