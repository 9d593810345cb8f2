#include <cmath>
#include <vector>

#include <doctest.h>

#include "ergode/chain_io.hpp"
#include "ergode/limits.hpp"
#include "test_util.hpp"

using namespace ergode;

TEST_CASE("dense matrix helpers") {
  const DenseMatrix I = identity_matrix(2);
  CHECK(I(0, 0) == 1.0);
  CHECK(I(0, 1) == 0.0);
  DenseMatrix a(2, 2, 0.0);
  a(0, 0) = 1.0;
  a(0, 1) = 2.0;
  a(1, 0) = 3.0;
  a(1, 1) = 4.0;
  const DenseMatrix prod = multiply(a, I);
  CHECK(prod == a);
  CHECK(max_abs_diff(prod, I) == 3.0);
}

TEST_CASE("cycle chain: A is constant 1/2 and the n=2 average is exact") {
  const ChainSpec spec = load_chain(testutil::data_path("cycle2.json"));
  const LimitReport report = limit_report(spec);
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(report.cesaro(i, j) == 0.5);

  const FiniteCesaro fc = finite_cesaro(spec.P, spec.mu0, 2);
  CHECK(max_abs_diff(fc.matrix_average, report.cesaro) == 0.0);
  CHECK(report.occupation == std::vector<double>{0.5, 0.5});
  CHECK(report.g_mean == 0.5);
  REQUIRE(report.pathwise.size() == 1);
  CHECK(report.pathwise[0].value == 0.5);
  CHECK(report.pathwise[0].probability == 1.0);
}

TEST_CASE("identity chain: A = I exactly and occupation equals mu0") {
  const ChainSpec spec = load_chain(testutil::data_path("identity3.json"));
  const LimitReport report = limit_report(spec);
  CHECK(report.cesaro == identity_matrix(3));
  CHECK(report.occupation == std::vector<double>{0.2, 0.3, 0.5});
  CHECK(report.g_mean == 0.0);
  // no g: all three closed classes collapse onto the single value 0
  REQUIRE(report.pathwise.size() == 1);
  CHECK(report.pathwise[0].value == 0.0);
  CHECK(std::abs(report.pathwise[0].probability - 1.0) < 1e-15);
}

TEST_CASE("gambler's ruin limits match the hand calculation") {
  const ChainSpec spec = load_chain(testutil::data_path("gamblers_ruin.json"));
  const LimitReport report = limit_report(spec);
  CHECK(std::abs(report.occupation[0] - 2.0 / 3.0) < 1e-12);
  CHECK(report.occupation[1] == 0.0);
  CHECK(report.occupation[2] == 0.0);
  CHECK(std::abs(report.occupation[3] - 1.0 / 3.0) < 1e-12);
  CHECK(std::abs(report.g_mean - 2.0 / 3.0) < 1e-12);  // g = 1 at the ruin state

  REQUIRE(report.pathwise.size() == 2);
  CHECK(report.pathwise[0].value == 1.0);
  CHECK(std::abs(report.pathwise[0].probability - 2.0 / 3.0) < 1e-12);
  CHECK(report.pathwise[1].value == 0.0);
  CHECK(std::abs(report.pathwise[1].probability - 1.0 / 3.0) < 1e-12);
}

TEST_CASE("two-class chain: occupation, g_mean, and the pathwise law") {
  const ChainSpec spec = load_chain(testutil::data_path("two_class.json"));
  const LimitReport report = limit_report(spec);
  CHECK(report.occupation[0] == 0.0);
  CHECK(std::abs(report.occupation[1] - 0.3) < 1e-12);
  CHECK(std::abs(report.occupation[2] - 0.7) < 1e-12);
  CHECK(std::abs(report.g_mean - 0.3) < 1e-12);
  REQUIRE(report.pathwise.size() == 2);
  CHECK(std::abs(report.pathwise[0].value - 1.0) < 1e-12);
  CHECK(std::abs(report.pathwise[0].probability - 0.3) < 1e-12);
  CHECK(std::abs(report.pathwise[1].value - 0.0) < 1e-12);
  CHECK(std::abs(report.pathwise[1].probability - 0.7) < 1e-12);
}

TEST_CASE("pathwise atoms with equal values merge") {
  RawChain raw;
  raw.states = {"x", "y"};
  raw.transitions = {{"x", {{"x", 1.0}}}, {"y", {{"y", 1.0}}}};
  raw.initial = {{"x", 0.4}, {"y", 0.6}};
  raw.g = {{"x", 2.0}, {"y", 2.0}};
  const LimitReport merged = limit_report(validate_chain(raw));
  REQUIRE(merged.pathwise.size() == 1);
  CHECK(merged.pathwise[0].value == 2.0);
  CHECK(std::abs(merged.pathwise[0].probability - 1.0) < 1e-15);

  raw.g = {{"x", 2.0}, {"y", 1.0}};
  const LimitReport split = limit_report(validate_chain(raw));
  REQUIRE(split.pathwise.size() == 2);
  CHECK(split.pathwise[0].value == 2.0);  // sorted by decreasing value
  CHECK(split.pathwise[1].value == 1.0);
}

TEST_CASE("projection identities A P = A = P A = A^2 hold on all test chains") {
  const char* files[] = {"gamblers_ruin.json", "two_class.json", "cycle2.json",
                         "identity3.json", "periodic3.json"};
  for (const char* file : files) {
    CAPTURE(file);
    const ChainSpec spec = load_chain(testutil::data_path(file));
    const LimitReport report = limit_report(spec);
    const DenseMatrix P = testutil::to_dense(spec.P);
    CHECK(max_abs_diff(multiply(report.cesaro, P), report.cesaro) < 1e-8);
    CHECK(max_abs_diff(multiply(P, report.cesaro), report.cesaro) < 1e-8);
    CHECK(max_abs_diff(multiply(report.cesaro, report.cesaro), report.cesaro) < 1e-8);
  }
  Xoshiro256PlusPlus rng(777, 2);
  for (int trial = 0; trial < 10; ++trial) {
    CAPTURE(trial);
    const ChainSpec spec = testutil::random_structured_chain(rng);
    const LimitReport report = limit_report(spec);
    const DenseMatrix P = testutil::to_dense(spec.P);
    CHECK(max_abs_diff(multiply(report.cesaro, P), report.cesaro) < 1e-8);
    CHECK(max_abs_diff(multiply(P, report.cesaro), report.cesaro) < 1e-8);
    CHECK(max_abs_diff(multiply(report.cesaro, report.cesaro), report.cesaro) < 1e-8);
  }
}

TEST_CASE("g-average equals the mean of the pathwise law (Corollary 1 vs 2)") {
  Xoshiro256PlusPlus rng(424243, 5);
  for (int trial = 0; trial < 15; ++trial) {
    CAPTURE(trial);
    const ChainSpec spec = testutil::random_structured_chain(rng);
    const LimitReport report = limit_report(spec);
    double mean = 0.0, mass = 0.0;
    for (const auto& atom : report.pathwise) {
      mean += atom.value * atom.probability;
      mass += atom.probability;
    }
    CHECK(std::abs(mean - report.g_mean) < 1e-8);
    CHECK(std::abs(mass - 1.0) < 1e-8);
  }
}

TEST_CASE("finite_cesaro approaches A, exactly at even horizons for period-2 chains") {
  const ChainSpec spec = load_chain(testutil::data_path("periodic3.json"));
  const LimitReport report = limit_report(spec);
  // eigenvalues are 1, -1, 0: the (-1)^k terms cancel in pairs, so even-n
  // averages agree with A to rounding
  const FiniteCesaro even = finite_cesaro(spec.P, spec.mu0, 10000);
  CHECK(max_abs_diff(even.matrix_average, report.cesaro) < 1e-9);
  const FiniteCesaro odd = finite_cesaro(spec.P, spec.mu0, 9999);
  CHECK(max_abs_diff(odd.matrix_average, report.cesaro) < 1e-3);
}

TEST_CASE("finite_cesaro deviation decreases along checkpoints on an absorbing chain") {
  const ChainSpec spec = load_chain(testutil::data_path("gamblers_ruin.json"));
  const LimitReport report = limit_report(spec);
  const std::size_t ns[] = {100, 400, 1600};
  const auto checkpoints = finite_cesaro_checkpoints(spec.P, spec.mu0, ns);
  REQUIRE(checkpoints.size() == 3);
  double prev = 1e9;
  for (const auto& fc : checkpoints) {
    const double dev = max_abs_diff(fc.matrix_average, report.cesaro);
    CHECK(dev <= prev + 1e-12);
    prev = dev;
  }
  CHECK(prev < 5e-2);
}

TEST_CASE("checkpoints reproduce individual finite_cesaro calls exactly") {
  const ChainSpec spec = load_chain(testutil::data_path("two_class.json"));
  const std::size_t ns[] = {3, 7};
  const auto both = finite_cesaro_checkpoints(spec.P, spec.mu0, ns);
  REQUIRE(both.size() == 2);
  CHECK(both[0].matrix_average == finite_cesaro(spec.P, spec.mu0, 3).matrix_average);
  CHECK(both[1].matrix_average == finite_cesaro(spec.P, spec.mu0, 7).matrix_average);
  CHECK(both[1].vector_average == finite_cesaro(spec.P, spec.mu0, 7).vector_average);
}

TEST_CASE("vector average is the mu0 contraction of the matrix average") {
  Xoshiro256PlusPlus rng(11, 4);
  for (int trial = 0; trial < 8; ++trial) {
    CAPTURE(trial);
    const ChainSpec spec = testutil::random_structured_chain(rng);
    const FiniteCesaro fc = finite_cesaro(spec.P, spec.mu0, 257);
    const std::size_t n = spec.space.size();
    for (std::size_t j = 0; j < n; ++j) {
      double expect = 0.0;
      for (const auto& [i, w] : spec.mu0.weights()) expect += w * fc.matrix_average(i, j);
      CHECK(std::abs(fc.vector_average[j] - expect) < 1e-12);
    }
  }
}

TEST_CASE("finite_cesaro guards its inputs") {
  using testutil::thrown_code;
  const ChainSpec spec = load_chain(testutil::data_path("cycle2.json"));
  CHECK(thrown_code([&] { finite_cesaro(spec.P, spec.mu0, 0); }) == ErrorCode::ParamOutOfRange);
  const std::size_t bad[] = {5, 5};
  CHECK(thrown_code([&] { finite_cesaro_checkpoints(spec.P, spec.mu0, bad); }) ==
        ErrorCode::ParamOutOfRange);

  const std::size_t big = kDenseGuard + 1;
  std::vector<std::vector<MatrixEntry>> rows(big);
  for (std::size_t i = 0; i < big; ++i) rows[i] = {{i, 1.0}};
  StochasticMatrix huge(big, std::move(rows));
  Distribution delta(big, {{0, 1.0}});
  CHECK(thrown_code([&] { finite_cesaro(huge, delta, 1); }) == ErrorCode::DimensionGuard);
}

TEST_CASE("limit_report with transient targets exposes extra f columns only") {
  const ChainSpec spec = load_chain(testutil::data_path("gamblers_ruin.json"));
  const LimitReport plain = limit_report(spec);
  const LimitReport full = limit_report(spec, {}, true);
  CHECK_FALSE(plain.hitting.column_valid[1]);
  CHECK(full.hitting.column_valid[1]);
  CHECK(plain.cesaro == full.cesaro);  // transient columns never feed the limits
  CHECK(plain.occupation == full.occupation);
}
