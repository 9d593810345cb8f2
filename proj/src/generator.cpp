#include "ergode/generator.hpp"

#include <cmath>
#include <sstream>

#include "ergode/errors.hpp"

namespace ergode {

const char* to_string(StateClass c) {
  switch (c) {
    case StateClass::Transient: return "Transient";
    case StateClass::NullRecurrent: return "NullRecurrent";
    case StateClass::PositiveRecurrent: return "PositiveRecurrent";
  }
  return "?";
}

namespace {

double require_param(const std::map<std::string, double>& params, const std::string& family,
                     const std::string& name) {
  auto it = params.find(name);
  if (it == params.end())
    fail(ErrorCode::ParamOutOfRange, family + " requires parameter " + name);
  return it->second;
}

void check_known_params(const std::map<std::string, double>& params, const std::string& family,
                        std::initializer_list<const char*> known) {
  for (const auto& [name, _] : params) {
    bool ok = false;
    for (const char* k : known) ok = ok || name == k;
    if (!ok) fail(ErrorCode::ParamOutOfRange, family + " does not take parameter " + name);
  }
}

void check_open_unit(double p, const std::string& family) {
  if (!(p > 0.0 && p < 1.0)) {
    std::ostringstream msg;
    msg << family << " requires p in (0,1), got " << p;
    fail(ErrorCode::ParamOutOfRange, msg.str());
  }
}

GeneratorChain make_srw_z(const std::map<std::string, double>& params) {
  check_known_params(params, "srw_z", {"p"});
  const double p = require_param(params, "srw_z", "p");
  check_open_unit(p, "srw_z");

  GeneratorChain chain;
  chain.family_name = "srw_z";
  chain.params = {{"p", p}};
  chain.step = [p](std::int64_t state, double u) { return u < p ? state + 1 : state - 1; };
  chain.start = 0;
  chain.target = 0;
  if (p == 0.5) {
    chain.declared_class_of_target = StateClass::NullRecurrent;
    chain.analytic.f_start_target = 1.0;
  } else {
    chain.declared_class_of_target = StateClass::Transient;
    chain.analytic.f_start_target = 2.0 * std::min(p, 1.0 - p);
  }
  return chain;
}

GeneratorChain make_reflecting_bd(const std::map<std::string, double>& params) {
  check_known_params(params, "reflecting_bd", {"p"});
  const double p = require_param(params, "reflecting_bd", "p");
  check_open_unit(p, "reflecting_bd");
  const double q = 1.0 - p;

  GeneratorChain chain;
  chain.family_name = "reflecting_bd";
  chain.params = {{"p", p}};
  chain.step = [p](std::int64_t state, double u) {
    if (u < p) return state + 1;
    return state > 0 ? state - 1 : state;  // at 0: stay with probability q
  };
  chain.start = 0;
  chain.target = 0;
  if (p < 0.5) {
    // Geometric stationary law pi_{i+1} = (p/q) pi_i gives pi_0 = 1 - p/q.
    chain.declared_class_of_target = StateClass::PositiveRecurrent;
    chain.analytic.f_start_target = 1.0;
    chain.analytic.m_target = 1.0 / (1.0 - p / q);
  } else if (p == 0.5) {
    chain.declared_class_of_target = StateClass::NullRecurrent;
    chain.analytic.f_start_target = 1.0;
  } else {
    chain.declared_class_of_target = StateClass::Transient;
    chain.analytic.f_start_target = 2.0 * q;
  }
  return chain;
}

void check_analytic(const GeneratorChain& chain) {
  if (chain.analytic.f_start_target) {
    const double f = *chain.analytic.f_start_target;
    if (!(f >= 0.0 && f <= 1.0))
      fail(ErrorCode::ParamOutOfRange, chain.family_name + " analytic f outside [0,1]");
  }
  if (chain.analytic.m_target) {
    const double m = *chain.analytic.m_target;
    if (!(m >= 1.0)) fail(ErrorCode::ParamOutOfRange, chain.family_name + " analytic m below 1");
  }
}

}  // namespace

GeneratorChain builtin_family(const std::string& name, const std::map<std::string, double>& params) {
  GeneratorChain chain;
  if (name == "srw_z")
    chain = make_srw_z(params);
  else if (name == "reflecting_bd")
    chain = make_reflecting_bd(params);
  else
    fail(ErrorCode::UnknownFamily, "unknown generator family '" + name + "'");
  check_analytic(chain);
  return chain;
}

}  // namespace ergode
