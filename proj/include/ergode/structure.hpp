#pragma once

#include <cstddef>
#include <vector>

#include "ergode/chain.hpp"
#include "ergode/generator.hpp"

namespace ergode {

struct CommClass {
  std::size_t id = 0;                // position in ClassStructure::classes
  std::vector<std::size_t> members;  // state indices, increasing
  bool closed = false;               // no positive probability leaves the class
};

// Condensation of the chain: communicating classes (the strongly connected
// components of the positive-transition digraph) in a topological order of the
// condensation with closed classes last, plus the finite-chain classification
// (positive recurrent iff the class is closed). NullRecurrent never occurs for
// finite chains; the enum value exists for generator-family reports.
struct ClassStructure {
  std::vector<CommClass> classes;
  std::vector<std::size_t> class_of;        // state index -> class id
  std::vector<StateClass> classification;   // state index -> class label

  std::size_t n_states() const noexcept { return class_of.size(); }
  std::vector<std::size_t> closed_class_ids() const;
};

// SCC decomposition (iterative Tarjan) + closed flags + classification.
// Topological tie-break among incomparable classes: smallest member index.
ClassStructure communicating_classes(const StochasticMatrix& P);

// PositiveRecurrent for members of closed classes, Transient otherwise.
std::vector<StateClass> classify_states(const ClassStructure& structure);

}  // namespace ergode
