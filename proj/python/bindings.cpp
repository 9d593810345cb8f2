#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <json.hpp>

#include "ergode/chain_io.hpp"
#include "ergode/errors.hpp"
#include "ergode/generator.hpp"
#include "ergode/limits.hpp"
#include "ergode/montecarlo.hpp"
#include "ergode/report.hpp"
#include "ergode/version.hpp"

namespace py = pybind11;

namespace {

py::object to_py(const nlohmann::json& v) {
  using value_t = nlohmann::json::value_t;
  switch (v.type()) {
    case value_t::null:
      return py::none();
    case value_t::boolean:
      return py::bool_(v.get<bool>());
    case value_t::number_integer:
      return py::int_(v.get<std::int64_t>());
    case value_t::number_unsigned:
      return py::int_(v.get<std::uint64_t>());
    case value_t::number_float:
      return py::float_(v.get<double>());
    case value_t::string:
      return py::str(v.get<std::string>());
    case value_t::array: {
      py::list out;
      for (const auto& item : v) out.append(to_py(item));
      return out;
    }
    case value_t::object: {
      py::dict out;
      for (auto it = v.begin(); it != v.end(); ++it) out[py::str(it.key())] = to_py(it.value());
      return out;
    }
    default:
      return py::none();
  }
}

ergode::ExperimentConfig make_config(std::size_t n, std::size_t paths, std::uint64_t seed,
                                     std::optional<double> band) {
  ergode::ExperimentConfig config;
  config.n = n;
  config.paths = paths;
  config.seed = seed;
  config.band = band;
  return config;
}

py::dict summary_to_py(const ergode::ExperimentSummary& summary) {
  return to_py(ergode::simulate_payload(summary));
}

py::dict trajectory_to_py(const ergode::ChainSpec& spec, const ergode::TrajectoryStats& stats) {
  py::dict out;
  out["n"] = stats.n;
  out["target"] = spec.space.label(static_cast<std::size_t>(stats.target));
  py::dict occupation;
  for (const auto& [state, count] : stats.occupation)
    occupation[py::str(spec.space.label(static_cast<std::size_t>(state)))] = count;
  out["occupation"] = occupation;
  py::dict first_passage;
  for (const auto& [state, step] : stats.first_passage)
    first_passage[py::str(spec.space.label(static_cast<std::size_t>(state)))] = step;
  out["first_passage"] = first_passage;
  out["gaps"] = stats.gaps;
  out["g_running"] = stats.g_running;
  return out;
}

py::dict average_to_py(const ergode::ErgodicAverageResult& result) {
  py::dict out;
  out["paths"] = result.paths;
  out["horizon"] = result.horizon;
  out["band"] = result.band;
  out["per_path"] = result.per_path;
  py::list clusters;
  for (const auto& c : result.clusters) {
    py::dict entry;
    entry["center"] = c.center;
    entry["mass"] = c.mass;
    entry["count"] = c.count;
    clusters.append(entry);
  }
  out["clusters"] = clusters;
  out["mean"] = result.mean;
  out["seed"] = result.seed;
  out["rng"] = result.rng_name;
  return out;
}

ergode::ChainSpec chain_from_dict(const py::dict& d, double row_tol) {
  ergode::RawChain raw;
  if (d.contains("states")) raw.states = d["states"].cast<std::vector<std::string>>();
  if (d.contains("transitions"))
    raw.transitions = d["transitions"].cast<std::map<std::string, std::map<std::string, double>>>();
  if (d.contains("initial")) raw.initial = d["initial"].cast<std::map<std::string, double>>();
  if (d.contains("g")) raw.g = d["g"].cast<std::map<std::string, double>>();
  return ergode::validate_chain(raw, row_tol);
}

}  // namespace

PYBIND11_MODULE(_ergode, m) {
  m.doc() = "Ergodic limits of discrete Markov chains: exact Cesaro limits, "
            "pathwise laws, and seeded Monte Carlo verification.";
  m.attr("__version__") = ergode::kVersion;

  py::register_exception<ergode::ErgodeError>(m, "ErgodeError");

  py::class_<ergode::ChainSpec>(m, "Chain")
      .def_static(
          "from_file",
          [](const std::string& path, double row_tol) { return ergode::load_chain(path, row_tol); },
          py::arg("path"), py::arg("row_tol") = ergode::kDefaultRowTol)
      .def_static("from_dict", &chain_from_dict, py::arg("spec"),
                  py::arg("row_tol") = ergode::kDefaultRowTol)
      .def_property_readonly("states",
                             [](const ergode::ChainSpec& s) { return s.space.labels(); })
      .def("to_json", [](const ergode::ChainSpec& s) { return ergode::chain_to_json(s); })
      .def(
          "classify",
          [](const ergode::ChainSpec& s) {
            return to_py(ergode::classify_payload(s.space, ergode::communicating_classes(s.P)));
          },
          "Communicating classes, closed flags, and per-state classification.")
      .def(
          "limits",
          [](const ergode::ChainSpec& s, bool transient_targets) {
            const auto report = ergode::limit_report(s, {}, transient_targets);
            return to_py(ergode::limits_payload(s.space, s, report));
          },
          py::arg("transient_targets") = false,
          "Exact ergodic limits: f columns, m, A, o, g_mean, pathwise law.")
      .def(
          "cesaro",
          [](const ergode::ChainSpec& s, std::size_t n) {
            const auto fc = ergode::finite_cesaro(s.P, s.mu0, n);
            const auto report = ergode::limit_report(s);
            return to_py(ergode::cesaro_payload(s.space, fc, &report.cesaro));
          },
          py::arg("n"), "Finite-n Cesaro averages plus the max-norm deviation from A.")
      .def(
          "simulate",
          [](const ergode::ChainSpec& s, const std::string& target, std::size_t n,
             std::size_t paths, std::uint64_t seed, std::optional<double> band) {
            const auto j = static_cast<std::int64_t>(s.space.index_of(target));
            return summary_to_py(
                ergode::convergence_experiment(s, j, make_config(n, paths, seed, band)));
          },
          py::arg("target"), py::arg("n") = 10000, py::arg("paths") = 1000, py::arg("seed") = 0,
          py::arg("band") = std::nullopt,
          "Occupation-fraction dichotomy experiment for a target state.")
      .def(
          "ergodic_average",
          [](const ergode::ChainSpec& s, std::size_t n, std::size_t paths, std::uint64_t seed,
             std::optional<double> band) {
            return average_to_py(
                ergode::ergodic_average_experiment(s, make_config(n, paths, seed, band)));
          },
          py::arg("n") = 10000, py::arg("paths") = 1000, py::arg("seed") = 0,
          py::arg("band") = std::nullopt,
          "Empirical law of the per-path g-average.")
      .def(
          "sample_path",
          [](const ergode::ChainSpec& s, const std::string& target, std::size_t n,
             std::uint64_t seed, std::uint64_t path_index) {
            const auto j = static_cast<std::int64_t>(s.space.index_of(target));
            return trajectory_to_py(s, ergode::sample_path(s, n, seed, path_index, j));
          },
          py::arg("target"), py::arg("n") = 10000, py::arg("seed") = 0, py::arg("path_index") = 0,
          "One seeded trajectory with occupation counts, first passages, and gaps.");

  m.def(
      "family_simulate",
      [](const std::string& family, const std::map<std::string, double>& params, std::size_t n,
         std::size_t paths, std::uint64_t seed, std::optional<double> band) {
        const auto chain = ergode::builtin_family(family, params);
        return summary_to_py(ergode::convergence_experiment(chain, make_config(n, paths, seed, band)));
      },
      py::arg("family"), py::arg("params"), py::arg("n") = 10000, py::arg("paths") = 1000,
      py::arg("seed") = 0, py::arg("band") = std::nullopt,
      "Dichotomy experiment for a built-in countable family (srw_z, reflecting_bd).");

  m.def(
      "canonical_json",
      [](const py::object& obj) {
        const std::string dumped =
            py::module_::import("json").attr("dumps")(obj).cast<std::string>();
        return ergode::canonical_json(nlohmann::json::parse(dumped));
      },
      py::arg("value"), "Canonical JSON emission (sorted keys, 17 significant digits).");
}
