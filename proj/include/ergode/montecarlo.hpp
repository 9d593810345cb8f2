#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ergode/chain.hpp"
#include "ergode/generator.hpp"
#include "ergode/solve.hpp"

namespace ergode {

// Everything observed along one simulated path. Occupation counts cover steps
// k = 1..n; the initial state is not counted. Stream layout per path: finite
// chains consume one draw for the initial state, then one draw per step;
// generator chains start fixed and consume one draw per step.
struct TrajectoryStats {
  std::size_t n = 0;
  std::int64_t target = 0;
  std::map<std::int64_t, std::int64_t> occupation;     // state -> M_state(n)
  std::map<std::int64_t, std::int64_t> first_passage;  // state -> first k with X_k = state
  std::vector<std::int64_t> gaps;                      // inter-visit gaps at the target
  double g_running = 0.0;                              // (1/n) sum_{k=1..n} g(X_k)
};

TrajectoryStats sample_path(const ChainSpec& chain, std::size_t n, std::uint64_t seed,
                            std::uint64_t path_index, std::int64_t target);

TrajectoryStats sample_path(const GeneratorChain& chain, std::size_t n, std::uint64_t seed,
                            std::uint64_t path_index, std::int64_t target,
                            const std::map<std::int64_t, double>& g = {});

struct ExperimentConfig {
  std::size_t n = 10000;
  std::size_t paths = 1000;
  std::uint64_t seed = 0;
  // Occupation-fraction band; default min(1/(2 m_j), 0.05) for positive
  // recurrent targets, 0.05 otherwise.
  std::optional<double> band;
  unsigned threads = 0;  // 0 = hardware concurrency
};

// Aggregate view of the occupation-fraction dichotomy across paths.
struct ExperimentSummary {
  std::size_t paths = 0;
  std::size_t horizon = 0;
  std::int64_t target = 0;
  double band = 0.0;
  double inverse_m = 0.0;  // 1/m_j for positive recurrent targets, else 0

  double frac_near_inverse_m = 0.0;  // |M/n - 1/m| < band
  double frac_near_zero = 0.0;       // M/n < band
  double frac_hit = 0.0;             // hit the target at some k >= 1
  double stderr_near_inverse_m = 0.0;
  double stderr_near_zero = 0.0;
  double stderr_hit = 0.0;

  std::optional<double> predicted_hit_mass;  // sum_i mu0_i f_ij, or declared analytic f

  double mean_occupation_fraction = 0.0;  // mean of M/n across paths
  double stderr_occupation_fraction = 0.0;

  std::uint64_t total_gaps = 0;
  std::optional<double> mean_gap;  // grand mean of inter-visit gaps, hitting paths
  std::optional<double> stderr_gap;

  std::uint64_t seed = 0;
  std::string rng_name;
};

// Runs `paths` independent trajectories and classifies terminal occupation
// fractions. Deterministic in (chain, config): paths are aggregated in fixed
// chunks so any thread count gives bit-identical output. Errors:
// MissingMeanReturnTime for a positive recurrent generator target without
// declared m.
ExperimentSummary convergence_experiment(const ChainSpec& chain, std::int64_t target,
                                         const ExperimentConfig& config,
                                         const SolveOptions& opts = {});

ExperimentSummary convergence_experiment(const GeneratorChain& chain,
                                         const ExperimentConfig& config);

// Empirical law of the pathwise g-average, for comparison against the exact
// pathwise_limit_distribution.
struct ErgodicAverageResult {
  struct Cluster {
    double center = 0.0;  // mean of member values
    double mass = 0.0;    // member count / paths
    std::size_t count = 0;
  };
  std::size_t paths = 0;
  std::size_t horizon = 0;
  double band = 0.0;
  std::vector<double> per_path;   // g_running by path index
  std::vector<Cluster> clusters;  // split where adjacent sorted values gap > band
  double mean = 0.0;
  std::uint64_t seed = 0;
  std::string rng_name;
};

ErgodicAverageResult ergodic_average_experiment(const ChainSpec& chain,
                                                const ExperimentConfig& config);

ErgodicAverageResult ergodic_average_experiment(const GeneratorChain& chain,
                                                const std::map<std::int64_t, double>& g,
                                                const ExperimentConfig& config);

// Thread count actually used for a requested value (respects 0 = auto).
unsigned resolve_threads(unsigned requested);

}  // namespace ergode
