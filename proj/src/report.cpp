#include "ergode/report.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>

#include "ergode/generator.hpp"

namespace ergode {

namespace {

void dump_canonical(const nlohmann::json& value, std::string& out) {
  using value_t = nlohmann::json::value_t;
  switch (value.type()) {
    case value_t::null:
      out += "null";
      break;
    case value_t::boolean:
      out += value.get<bool>() ? "true" : "false";
      break;
    case value_t::number_integer:
      out += std::to_string(value.get<std::int64_t>());
      break;
    case value_t::number_unsigned:
      out += std::to_string(value.get<std::uint64_t>());
      break;
    case value_t::number_float: {
      const double d = value.get<double>();
      if (!std::isfinite(d)) {
        out += "null";  // JSON has no inf/nan; payload builders avoid these anyway
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", d);
      out += buf;
      break;
    }
    case value_t::string:
      out += nlohmann::json(value.get<std::string>()).dump();  // reuse escaping
      break;
    case value_t::array: {
      out += '[';
      bool first = true;
      for (const auto& item : value) {
        if (!first) out += ',';
        first = false;
        dump_canonical(item, out);
      }
      out += ']';
      break;
    }
    case value_t::object: {
      out += '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ',';
        first = false;
        out += nlohmann::json(it.key()).dump();
        out += ':';
        dump_canonical(it.value(), out);
      }
      out += '}';
      break;
    }
    default:
      out += "null";
      break;
  }
}

}  // namespace

std::string canonical_json(const nlohmann::json& value) {
  std::string out;
  dump_canonical(value, out);
  out += '\n';
  return out;
}

nlohmann::json matrix_to_json(const DenseMatrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

nlohmann::json classify_payload(const StateSpace& space, const ClassStructure& structure) {
  nlohmann::json out;
  out["states"] = space.labels();
  nlohmann::json classes = nlohmann::json::array();
  for (const auto& cls : structure.classes) {
    nlohmann::json entry;
    entry["id"] = cls.id;
    entry["closed"] = cls.closed;
    nlohmann::json members = nlohmann::json::array();
    for (std::size_t idx : cls.members) members.push_back(space.label(idx));
    entry["members"] = std::move(members);
    classes.push_back(std::move(entry));
  }
  out["classes"] = std::move(classes);
  nlohmann::json classification = nlohmann::json::array();
  for (StateClass c : structure.classification) classification.push_back(to_string(c));
  out["classification"] = std::move(classification);
  return out;
}

nlohmann::json limits_payload(const StateSpace& space, const ChainSpec& spec,
                              const LimitReport& report) {
  nlohmann::json out;
  out["states"] = space.labels();

  const std::size_t n = space.size();
  nlohmann::json f_cols;  // target label -> column of f; only solved columns
  for (std::size_t j = 0; j < n; ++j) {
    if (!report.hitting.column_valid[j]) continue;
    nlohmann::json col = nlohmann::json::array();
    for (std::size_t i = 0; i < n; ++i) col.push_back(report.hitting.f(i, j));
    f_cols[space.label(j)] = std::move(col);
  }
  out["f"] = std::move(f_cols);

  nlohmann::json m = nlohmann::json::array();  // null marks +infinity (transient state)
  for (std::size_t j = 0; j < n; ++j) {
    if (std::isfinite(report.mean_return[j]))
      m.push_back(report.mean_return[j]);
    else
      m.push_back(nullptr);
  }
  out["mean_return_time"] = std::move(m);

  out["cesaro_limit"] = matrix_to_json(report.cesaro);
  out["occupation"] = report.occupation;
  if (!spec.g.empty()) out["g_mean"] = report.g_mean;

  nlohmann::json pathwise = nlohmann::json::array();
  for (const auto& atom : report.pathwise) {
    nlohmann::json entry;
    entry["value"] = atom.value;
    entry["probability"] = atom.probability;
    pathwise.push_back(std::move(entry));
  }
  out["pathwise_law"] = std::move(pathwise);
  return out;
}

nlohmann::json cesaro_payload(const StateSpace& space, const FiniteCesaro& fc,
                              const DenseMatrix* analytic_limit) {
  nlohmann::json out;
  out["states"] = space.labels();
  out["n"] = fc.n;
  out["matrix_average"] = matrix_to_json(fc.matrix_average);
  out["vector_average"] = fc.vector_average;
  if (analytic_limit != nullptr)
    out["deviation_from_limit"] = max_abs_diff(fc.matrix_average, *analytic_limit);
  return out;
}

nlohmann::json simulate_payload(const ExperimentSummary& summary) {
  nlohmann::json out;
  out["paths"] = summary.paths;
  out["horizon"] = summary.horizon;
  out["target"] = summary.target;
  out["band"] = summary.band;
  out["inverse_m"] = summary.inverse_m;
  out["frac_near_inverse_m"] = summary.frac_near_inverse_m;
  out["stderr_near_inverse_m"] = summary.stderr_near_inverse_m;
  out["frac_near_zero"] = summary.frac_near_zero;
  out["stderr_near_zero"] = summary.stderr_near_zero;
  out["frac_hit"] = summary.frac_hit;
  out["stderr_hit"] = summary.stderr_hit;
  if (summary.predicted_hit_mass) out["predicted_hit_mass"] = *summary.predicted_hit_mass;
  out["mean_occupation_fraction"] = summary.mean_occupation_fraction;
  out["stderr_occupation_fraction"] = summary.stderr_occupation_fraction;
  out["total_gaps"] = summary.total_gaps;
  if (summary.mean_gap) out["mean_gap"] = *summary.mean_gap;
  if (summary.stderr_gap) out["stderr_gap"] = *summary.stderr_gap;
  out["seed"] = summary.seed;
  out["rng"] = summary.rng_name;
  return out;
}

}  // namespace ergode
