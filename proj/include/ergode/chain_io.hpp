#pragma once

#include <string>

#include "ergode/chain.hpp"

namespace ergode {

// Chain file format: one JSON document with fields
//   states       array of state labels (strings)
//   transitions  object: state -> object of state -> probability
//   initial      object: state -> probability
//   g            optional object: state -> value
// Unknown top-level keys are rejected (BadChainFile).
RawChain parse_chain_json(const std::string& text);

RawChain load_chain_file(const std::string& path);

ChainSpec load_chain(const std::string& path, double row_tol = kDefaultRowTol);

// Emits the spec back in the file format (canonical key order, exact values).
std::string chain_to_json(const ChainSpec& spec);

}  // namespace ergode
