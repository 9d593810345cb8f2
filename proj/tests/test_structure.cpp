#include <algorithm>
#include <vector>

#include <doctest.h>

#include "ergode/chain_io.hpp"
#include "ergode/structure.hpp"
#include "test_util.hpp"

using namespace ergode;

TEST_CASE("gambler's ruin splits into two absorbing classes and one open class") {
  const ChainSpec spec = load_chain(testutil::data_path("gamblers_ruin.json"));
  const ClassStructure s = communicating_classes(spec.P);
  REQUIRE(s.classes.size() == 3);
  CHECK(s.class_of[1] == s.class_of[2]);
  CHECK(s.class_of[0] != s.class_of[3]);

  int closed = 0;
  for (const auto& cls : s.classes) closed += cls.closed ? 1 : 0;
  CHECK(closed == 2);

  CHECK(s.classification[0] == StateClass::PositiveRecurrent);
  CHECK(s.classification[1] == StateClass::Transient);
  CHECK(s.classification[2] == StateClass::Transient);
  CHECK(s.classification[3] == StateClass::PositiveRecurrent);
}

TEST_CASE("a cycle is one closed class of positive recurrent states") {
  const ChainSpec spec = load_chain(testutil::data_path("cycle2.json"));
  const ClassStructure s = communicating_classes(spec.P);
  REQUIRE(s.classes.size() == 1);
  CHECK(s.classes[0].closed);
  CHECK(s.classes[0].members == std::vector<std::size_t>{0, 1});
  CHECK(s.classification[0] == StateClass::PositiveRecurrent);
}

TEST_CASE("open classes precede closed classes and ids match positions") {
  const ChainSpec spec = load_chain(testutil::data_path("two_class.json"));
  const ClassStructure s = communicating_classes(spec.P);
  REQUIRE(s.classes.size() == 3);
  CHECK_FALSE(s.classes[0].closed);   // the transient start comes first
  CHECK(s.classes[1].closed);
  CHECK(s.classes[2].closed);
  for (std::size_t t = 0; t < s.classes.size(); ++t) CHECK(s.classes[t].id == t);
}

TEST_CASE("communicating_classes agrees with the reachability oracle") {
  Xoshiro256PlusPlus rng(2024, 7);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = 2 + testutil::pick(rng, 9);
    const StochasticMatrix P = testutil::random_stochastic(rng, n);
    const ClassStructure s = communicating_classes(P);
    const auto reach = testutil::reachability(P);

    CAPTURE(trial);
    CAPTURE(n);

    // same class iff mutually reachable (or identical)
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        const bool together = i == j || (reach[i][j] && reach[j][i]);
        CHECK((s.class_of[i] == s.class_of[j]) == together);
      }

    // closed iff no edge leaves the class; classification follows closedness
    std::vector<std::size_t> seen(n, 0);
    for (const auto& cls : s.classes) {
      bool leaves = false;
      for (const std::size_t i : cls.members) {
        ++seen[i];
        for (const auto& e : P.row(i)) leaves = leaves || s.class_of[e.col] != cls.id;
      }
      CHECK(cls.closed == !leaves);
      CHECK(std::is_sorted(cls.members.begin(), cls.members.end()));
      for (const std::size_t i : cls.members)
        CHECK(s.classification[i] ==
              (cls.closed ? StateClass::PositiveRecurrent : StateClass::Transient));
    }
    for (std::size_t i = 0; i < n; ++i) CHECK(seen[i] == 1);  // partition

    // emitted order is topological on the condensation, closed classes last
    std::vector<std::size_t> position(s.classes.size());
    for (std::size_t t = 0; t < s.classes.size(); ++t) position[s.classes[t].id] = t;
    bool seen_closed = false;
    for (const auto& cls : s.classes) {
      if (cls.closed) seen_closed = true;
      if (seen_closed) CHECK(cls.closed);  // no open class after a closed one
    }
    for (std::size_t i = 0; i < n; ++i)
      for (const auto& e : P.row(i))
        if (s.class_of[i] != s.class_of[e.col])
          CHECK(position[s.class_of[i]] < position[s.class_of[e.col]]);
  }
}

TEST_CASE("structured random chains classify as constructed") {
  Xoshiro256PlusPlus rng(99, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const ChainSpec spec = testutil::random_structured_chain(rng);
    const ClassStructure s = communicating_classes(spec.P);
    CAPTURE(trial);
    // every closed class is positive recurrent, and at least one exists
    std::size_t n_closed = 0;
    for (const auto& cls : s.classes) n_closed += cls.closed ? 1 : 0;
    CHECK(n_closed >= 1);
    CHECK(s.n_states() == spec.space.size());
  }
}
