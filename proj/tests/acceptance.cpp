// Acceptance gate: one PASS/FAIL line per criterion, exit code = #failures.
// argv[1] (or ERGODE_CLI) points at the CLI binary for the determinism check.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <string>
#include <vector>

#include "ergode/chain_io.hpp"
#include "ergode/limits.hpp"
#include "ergode/montecarlo.hpp"
#include "ergode/report.hpp"
#include "test_util.hpp"

using namespace ergode;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;
std::string cli_path;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void report(bool ok, const std::string& name, const std::string& detail) {
  std::printf("%s  %s  [%s]\n", ok ? "PASS" : "FAIL", name.c_str(), detail.c_str());
  if (!ok) ++failures;
}

std::string run_capture(const std::string& cmd, int& exit_code) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) {
    exit_code = -1;
    return out;
  }
  char buf[4096];
  std::size_t got = 0;
  while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, got);
  const int status = pclose(pipe);
  exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return out;
}

// 1. Theorem 1 oracle equivalence on 50 randomized chains (N <= 20):
//    max_ij |A_n - A| < 1e-2 at n = 2e4, non-increasing from n = 5e3, < 30 s.
void criterion_1() {
  const auto t0 = Clock::now();
  Xoshiro256PlusPlus rng(2026, 0);
  double worst = 0.0;
  bool ok = true;
  for (int c = 0; c < 50; ++c) {
    const ChainSpec spec = testutil::random_structured_chain(rng);
    const LimitReport rep = limit_report(spec);
    const std::size_t ns[] = {5000, 20000};
    const auto cps = finite_cesaro_checkpoints(spec.P, spec.mu0, ns);
    const double d5 = max_abs_diff(cps[0].matrix_average, rep.cesaro);
    const double d20 = max_abs_diff(cps[1].matrix_average, rep.cesaro);
    worst = std::max(worst, d20);
    ok = ok && d20 < 1e-2 && d20 <= d5 + 1e-12;
  }
  const double secs = seconds_since(t0);
  ok = ok && secs < 30.0;
  std::ostringstream detail;
  detail << "50 chains, max dev(n=2e4) = " << worst << " < 1e-2, non-increasing from n=5e3, "
         << secs << " s < 30 s";
  report(ok, "1 theorem-1 oracle equivalence", detail.str());
}

// 2. Exact small cases: gambler f_{1,0} = 2/3 (1e-10); 2-state cycle A = 1/2
//    exactly at oracle n=2; identity chain A = I exactly.
void criterion_2() {
  bool ok = true;
  std::ostringstream detail;

  const ChainSpec gamblers = load_chain(testutil::data_path("gamblers_ruin.json"));
  const LimitReport grep = limit_report(gamblers);
  const double f10 = grep.hitting.f(1, 0);
  ok = ok && std::abs(f10 - 2.0 / 3.0) < 1e-10;
  detail << "f(1,0) = " << f10 << " (tol 1e-10)";

  const ChainSpec cycle = load_chain(testutil::data_path("cycle2.json"));
  const FiniteCesaro fc2 = finite_cesaro(cycle.P, cycle.mu0, 2);
  bool cycle_exact = true;
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) cycle_exact = cycle_exact && fc2.matrix_average(i, j) == 0.5;
  const LimitReport crep = limit_report(cycle);
  cycle_exact = cycle_exact && max_abs_diff(crep.cesaro, fc2.matrix_average) < 1e-12;
  ok = ok && cycle_exact;
  detail << "; cycle A(n=2) == 1/2 " << (cycle_exact ? "exact" : "WRONG");

  const ChainSpec id3 = load_chain(testutil::data_path("identity3.json"));
  const FiniteCesaro fid = finite_cesaro(id3.P, id3.mu0, 7);
  const bool id_exact = fid.matrix_average == identity_matrix(3) &&
                        max_abs_diff(limit_report(id3).cesaro, identity_matrix(3)) < 1e-12;
  ok = ok && id_exact;
  detail << "; identity A == I " << (id_exact ? "exact" : "WRONG");

  report(ok, "2 exact small cases", detail.str());
}

// 3. Projection identities A P = A = P A = A^2 within 1e-8 on all test chains.
void criterion_3() {
  double worst = 0.0;
  const char* files[] = {"gamblers_ruin.json", "two_class.json", "cycle2.json", "identity3.json",
                         "periodic3.json"};
  std::vector<ChainSpec> chains;
  for (const char* f : files) chains.push_back(load_chain(testutil::data_path(f)));
  Xoshiro256PlusPlus rng(7, 0);
  for (int c = 0; c < 25; ++c) chains.push_back(testutil::random_structured_chain(rng));

  for (const ChainSpec& spec : chains) {
    const DenseMatrix A = limit_report(spec).cesaro;
    const DenseMatrix P = testutil::to_dense(spec.P);
    worst = std::max(worst, max_abs_diff(multiply(A, P), A));
    worst = std::max(worst, max_abs_diff(multiply(P, A), A));
    worst = std::max(worst, max_abs_diff(multiply(A, A), A));
  }
  std::ostringstream detail;
  detail << chains.size() << " chains, max |AP-A|,|PA-A|,|AA-A| = " << worst << " < 1e-8";
  report(worst < 1e-8, "3 projection identities", detail.str());
}

// 4. Proposition dichotomy on the two-class chain: |frac_hit - 0.3| <= 0.014
//    (3 binomial SE), coverage >= 0.99, n = 1e3, paths = 1e4, < 10 s.
void criterion_4() {
  const auto t0 = Clock::now();
  const ChainSpec spec = load_chain(testutil::data_path("two_class.json"));
  ExperimentConfig config;
  config.n = 1000;
  config.paths = 10000;
  config.seed = 2026;
  const ExperimentSummary s = convergence_experiment(spec, 1, config);
  const double secs = seconds_since(t0);
  const double coverage = s.frac_near_inverse_m + s.frac_near_zero;
  const bool ok = std::abs(s.frac_hit - 0.3) <= 0.014 && coverage >= 0.99 && secs < 10.0;
  std::ostringstream detail;
  detail << "frac_hit = " << s.frac_hit << " (0.3 +- 0.014), coverage = " << coverage
         << " >= 0.99, " << secs << " s < 10 s";
  report(ok, "4 occupation-fraction dichotomy", detail.str());
}

// 5. Corollary consistency: E[pathwise law] == g_average_limit within 1e-8
//    analytically; simulated cluster masses within 3 sigma on the two-class chain.
void criterion_5() {
  bool ok = true;
  double worst = 0.0;
  std::vector<ChainSpec> chains;
  for (const char* f : {"gamblers_ruin.json", "two_class.json", "cycle2.json", "periodic3.json"})
    chains.push_back(load_chain(testutil::data_path(f)));
  Xoshiro256PlusPlus rng(11, 0);
  for (int c = 0; c < 10; ++c) chains.push_back(testutil::random_structured_chain(rng));
  for (const ChainSpec& spec : chains) {
    const LimitReport rep = limit_report(spec);
    double mean = 0.0;
    for (const PathwiseAtom& atom : rep.pathwise) mean += atom.value * atom.probability;
    worst = std::max(worst, std::abs(mean - rep.g_mean));
  }
  ok = ok && worst < 1e-8;

  const ChainSpec two = load_chain(testutil::data_path("two_class.json"));
  const LimitReport rep = limit_report(two);
  ExperimentConfig config;
  config.n = 1000;
  config.paths = 10000;
  config.seed = 5;
  const ErgodicAverageResult mc = ergodic_average_experiment(two, config);
  bool clusters_ok = mc.clusters.size() == rep.pathwise.size();
  double worst_mass = 0.0;
  if (clusters_ok) {
    for (std::size_t a = 0; a < rep.pathwise.size(); ++a) {
      const double p = rep.pathwise[a].probability;
      const double sigma = std::sqrt(p * (1.0 - p) / static_cast<double>(config.paths));
      clusters_ok = clusters_ok && std::abs(mc.clusters[a].center - rep.pathwise[a].value) < 1e-9;
      worst_mass = std::max(worst_mass, std::abs(mc.clusters[a].mass - p) / sigma);
    }
    clusters_ok = clusters_ok && worst_mass <= 3.0;
  }
  ok = ok && clusters_ok;
  std::ostringstream detail;
  detail << chains.size() << " chains, max |E[law] - g_mean| = " << worst
         << " < 1e-8; cluster mass max dev = " << worst_mass << " sigma <= 3";
  report(ok, "5 corollary 1/2 consistency", detail.str());
}

// 6. Mean-return-time validation: reflecting_bd p = 1/3, n = 1e5, paths = 200,
//    grand mean gap within 5 SE of m_0 = 2.
void criterion_6() {
  const GeneratorChain chain = builtin_family("reflecting_bd", {{"p", 1.0 / 3.0}});
  ExperimentConfig config;
  config.n = 100000;
  config.paths = 200;
  config.seed = 2026;
  const ExperimentSummary s = convergence_experiment(chain, config);
  bool ok = s.mean_gap.has_value() && s.stderr_gap.has_value() && *s.stderr_gap > 0.0;
  double dev = 0.0;
  if (ok) {
    dev = std::abs(*s.mean_gap - 2.0) / *s.stderr_gap;
    ok = dev <= 5.0;
  }
  std::ostringstream detail;
  detail << "mean gap = " << (s.mean_gap ? *s.mean_gap : 0.0) << ", |dev| = " << dev
         << " SE <= 5 (m_0 = 2)";
  report(ok, "6 mean return time, reflecting_bd p=1/3", detail.str());
}

// 7. Null-recurrent decay (srw_z p=1/2): mean M_0(n)/n strictly decreasing over
//    n in {1e4, 1e5, 1e6} and < 0.01 at 1e6; transient srw_z p=0.7: frac_hit
//    within 3 sigma of 2 min(p,q) = 0.6 over 1e5 paths.
void criterion_7() {
  const GeneratorChain fair = builtin_family("srw_z", {{"p", 0.5}});
  double fracs[3] = {0, 0, 0};
  const std::size_t horizons[3] = {10000, 100000, 1000000};
  for (int t = 0; t < 3; ++t) {
    ExperimentConfig config;
    config.n = horizons[t];
    config.paths = 100;
    config.seed = 2026;
    fracs[t] = convergence_experiment(fair, config).mean_occupation_fraction;
  }
  bool ok = fracs[0] > fracs[1] && fracs[1] > fracs[2] && fracs[2] < 0.01;

  const GeneratorChain biased = builtin_family("srw_z", {{"p", 0.7}});
  ExperimentConfig config;
  config.n = 500;
  config.paths = 100000;
  config.seed = 2026;
  const ExperimentSummary s = convergence_experiment(biased, config);
  const double sigma = std::sqrt(0.6 * 0.4 / 100000.0);
  ok = ok && std::abs(s.frac_hit - 0.6) <= 3.0 * sigma;

  std::ostringstream detail;
  detail << "M/n = " << fracs[0] << " > " << fracs[1] << " > " << fracs[2]
         << " < 0.01; p=0.7 frac_hit = " << s.frac_hit << " (0.6 +- " << 3.0 * sigma << ")";
  report(ok, "7 null-recurrent decay and transient return frequency", detail.str());
}

// 8. Determinism: identical seeds give byte-identical CLI JSON; parallel and
//    serial library runs agree exactly.
void criterion_8() {
  bool ok = true;
  std::ostringstream detail;

  const std::string cmd = "\"" + cli_path + "\" simulate \"" +
                          testutil::data_path("two_class.json") +
                          "\" --target c1 --n 300 --paths 1000 --seed 7 --json 2>/dev/null";
  int rc1 = -1, rc2 = -1;
  const std::string out1 = run_capture(cmd, rc1);
  const std::string out2 = run_capture(cmd, rc2);
  const bool cli_ok =
      rc1 == 0 && rc2 == 0 && !out1.empty() && out1 == out2 && out1.front() == '{';
  ok = ok && cli_ok;
  detail << "cli bytes " << (cli_ok ? "identical" : "DIFFER") << " (" << out1.size() << " bytes)";

  const ChainSpec spec = load_chain(testutil::data_path("two_class.json"));
  ExperimentConfig serial;
  serial.n = 300;
  serial.paths = 3000;
  serial.seed = 7;
  serial.threads = 1;
  ExperimentConfig parallel = serial;
  parallel.threads = 3;
  const ExperimentSummary a = convergence_experiment(spec, 1, serial);
  const ExperimentSummary b = convergence_experiment(spec, 1, parallel);
  const bool lib_ok = canonical_json(simulate_payload(a)) == canonical_json(simulate_payload(b));
  ok = ok && lib_ok;
  detail << "; serial == parallel " << (lib_ok ? "exact" : "DIFFER");

  report(ok, "8 determinism and parallel agreement", detail.str());
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) {
    cli_path = argv[1];
  } else if (const char* env = std::getenv("ERGODE_CLI")) {
    cli_path = env;
  } else {
    cli_path = "build/tools/ergode";
  }

  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();

  std::printf("%d/8 criteria passed\n", 8 - failures);
  return failures;
}
