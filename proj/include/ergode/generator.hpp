#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

namespace ergode {

enum class StateClass { Transient, NullRecurrent, PositiveRecurrent };

const char* to_string(StateClass c);

// Closed-form values declared alongside a generator family. These are inputs
// to the simulation experiments, never inferred by the library.
struct AnalyticInfo {
  std::optional<double> f_start_target;  // P(ever hit target | start)
  std::optional<double> m_target;        // mean return time of the target
};

// Countable-state chain given by a pure step rule. The step function must be
// deterministic in (state, draw); all randomness enters through the draw.
struct GeneratorChain {
  std::string family_name;
  std::map<std::string, double> params;
  std::function<std::int64_t(std::int64_t state, double u)> step;
  std::int64_t start = 0;
  std::int64_t target = 0;
  StateClass declared_class_of_target = StateClass::Transient;
  AnalyticInfo analytic;
};

// Families:
//   srw_z         simple random walk on the integers, params {p}: step +1 with
//                 probability p, else -1. Null recurrent at p = 1/2, transient
//                 otherwise (f_00 = 2 min(p, 1-p)).
//   reflecting_bd birth-death walk on the non-negative integers, params {p}:
//                 up with probability p, down with q = 1-p, stay at 0 with
//                 probability q. Positive recurrent for p < 1/2 with
//                 m_0 = 1/(1 - p/q), null recurrent at p = 1/2, transient for
//                 p > 1/2 (f_00 = 2(1-p)).
// Errors: UnknownFamily, ParamOutOfRange.
GeneratorChain builtin_family(const std::string& name, const std::map<std::string, double>& params);

}  // namespace ergode
