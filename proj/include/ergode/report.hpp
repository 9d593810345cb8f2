#pragma once

#include <string>

#include <json.hpp>

#include "ergode/chain.hpp"
#include "ergode/limits.hpp"
#include "ergode/montecarlo.hpp"
#include "ergode/structure.hpp"

namespace ergode {

// Canonical JSON emission: object keys sorted, floating-point numbers with 17
// significant digits (round-trip exact), single trailing newline. Repeated
// runs over equal values are byte-identical.
std::string canonical_json(const nlohmann::json& value);

// Payload builders shared by the CLI and the bindings. All state-indexed
// vectors are emitted as arrays aligned with the "states" array.
nlohmann::json classify_payload(const StateSpace& space, const ClassStructure& structure);
nlohmann::json limits_payload(const StateSpace& space, const ChainSpec& spec,
                              const LimitReport& report);
nlohmann::json cesaro_payload(const StateSpace& space, const FiniteCesaro& fc,
                              const DenseMatrix* analytic_limit);
nlohmann::json simulate_payload(const ExperimentSummary& summary);

nlohmann::json matrix_to_json(const DenseMatrix& m);

}  // namespace ergode
