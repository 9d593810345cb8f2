// ergode command-line tool: classify | limits | cesaro | simulate.
// stdout carries exactly one report (table by default, --json for canonical
// JSON); stderr carries diagnostics, including wall time.

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ergode/chain_io.hpp"
#include "ergode/errors.hpp"
#include "ergode/generator.hpp"
#include "ergode/limits.hpp"
#include "ergode/montecarlo.hpp"
#include "ergode/report.hpp"
#include "ergode/version.hpp"

namespace {

using nlohmann::json;

int exit_code_for(ergode::ErrorCode code) {
  switch (code) {
    case ergode::ErrorCode::SingularSystem:
    case ergode::ErrorCode::NoConvergence:
      return 3;
    case ergode::ErrorCode::DimensionGuard:
      return 4;
    case ergode::ErrorCode::MissingMeanReturnTime:
      return 5;
    default:
      return 2;  // parse/validation
  }
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Table cells come from the payload JSON so both output modes show the same
// numeric values; null encodes +infinity in mean-return arrays.
std::string fmt_cell(const json& v) {
  if (v.is_null()) return "inf";
  if (v.is_number_float()) return fmt(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

json make_report(const std::string& kind, json payload, json parameters) {
  json metadata;
  metadata["version"] = ergode::kVersion;
  metadata["parameters"] = std::move(parameters);
  json report;
  report["kind"] = kind;
  report["payload"] = std::move(payload);
  report["metadata"] = std::move(metadata);
  return report;
}

void print_kv(const char* key, const std::string& value) {
  std::printf("%-24s %s\n", key, value.c_str());
}

void print_matrix(const json& rows, const json& labels) {
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::printf("  %-8s", labels[i].get<std::string>().c_str());
    for (const auto& v : rows[i]) std::printf(" %s", fmt_cell(v).c_str());
    std::printf("\n");
  }
}

void print_metadata(const json& metadata) {
  std::printf("--\nergode %s", metadata["version"].get<std::string>().c_str());
  if (metadata.contains("rng")) std::printf("  rng=%s", metadata["rng"].get<std::string>().c_str());
  if (metadata.contains("seed")) std::printf("  seed=%s", fmt_cell(metadata["seed"]).c_str());
  std::printf("\nparameters:");
  for (auto it = metadata["parameters"].begin(); it != metadata["parameters"].end(); ++it)
    std::printf(" %s=%s", it.key().c_str(), fmt_cell(it.value()).c_str());
  std::printf("\n");
}

void render_classify(const json& payload) {
  const json& states = payload["states"];
  std::printf("states (%zu):", states.size());
  for (const auto& s : states) std::printf(" %s", s.get<std::string>().c_str());
  std::printf("\n\ncommunicating classes:\n");
  for (const auto& cls : payload["classes"]) {
    std::printf("  class %s [%s] members:", fmt_cell(cls["id"]).c_str(),
                cls["closed"].get<bool>() ? "closed" : "open");
    for (const auto& m : cls["members"]) std::printf(" %s", m.get<std::string>().c_str());
    std::printf("\n");
  }
  std::printf("\nstate classification:\n");
  for (std::size_t i = 0; i < states.size(); ++i)
    std::printf("  %-8s %s\n", states[i].get<std::string>().c_str(),
                payload["classification"][i].get<std::string>().c_str());
}

void render_limits(const json& payload) {
  const json& states = payload["states"];
  std::printf("mean return times m:\n");
  for (std::size_t i = 0; i < states.size(); ++i)
    std::printf("  %-8s %s\n", states[i].get<std::string>().c_str(),
                fmt_cell(payload["mean_return_time"][i]).c_str());
  std::printf("\ncesaro limit A:\n");
  print_matrix(payload["cesaro_limit"], states);
  std::printf("\naveraged occupation limit o:\n");
  for (std::size_t i = 0; i < states.size(); ++i)
    std::printf("  %-8s %s\n", states[i].get<std::string>().c_str(),
                fmt_cell(payload["occupation"][i]).c_str());
  std::printf("\nhitting probabilities f (solved target columns):\n");
  for (auto it = payload["f"].begin(); it != payload["f"].end(); ++it) {
    std::printf("  target %-8s", it.key().c_str());
    for (const auto& v : it.value()) std::printf(" %s", fmt_cell(v).c_str());
    std::printf("\n");
  }
  if (payload.contains("g_mean")) {
    std::printf("\n");
    print_kv("g_mean", fmt_cell(payload["g_mean"]));
  }
  std::printf("\npathwise law of lim (1/n) sum g(X_k):\n");
  for (const auto& atom : payload["pathwise_law"])
    std::printf("  value %-22s probability %s\n", fmt_cell(atom["value"]).c_str(),
                fmt_cell(atom["probability"]).c_str());
}

void render_cesaro(const json& payload) {
  print_kv("n", fmt_cell(payload["n"]));
  std::printf("\nmatrix average (1/n) sum P^k:\n");
  print_matrix(payload["matrix_average"], payload["states"]);
  std::printf("\nvector average (1/n) sum mu^(k):\n");
  const json& states = payload["states"];
  for (std::size_t i = 0; i < states.size(); ++i)
    std::printf("  %-8s %s\n", states[i].get<std::string>().c_str(),
                fmt_cell(payload["vector_average"][i]).c_str());
  if (payload.contains("deviation_from_limit")) {
    std::printf("\n");
    print_kv("deviation_from_limit", fmt_cell(payload["deviation_from_limit"]));
  }
}

void render_simulate(const json& payload) {
  print_kv("paths", fmt_cell(payload["paths"]));
  print_kv("horizon", fmt_cell(payload["horizon"]));
  print_kv("target", fmt_cell(payload.contains("target_label") ? payload["target_label"]
                                                               : payload["target"]));
  print_kv("band", fmt_cell(payload["band"]));
  print_kv("inverse_m", fmt_cell(payload["inverse_m"]));
  std::printf("\n");
  print_kv("frac_near_inverse_m",
           fmt_cell(payload["frac_near_inverse_m"]) + "  (stderr " +
               fmt_cell(payload["stderr_near_inverse_m"]) + ")");
  print_kv("frac_near_zero", fmt_cell(payload["frac_near_zero"]) + "  (stderr " +
                                 fmt_cell(payload["stderr_near_zero"]) + ")");
  print_kv("frac_hit",
           fmt_cell(payload["frac_hit"]) + "  (stderr " + fmt_cell(payload["stderr_hit"]) + ")");
  if (payload.contains("predicted_hit_mass"))
    print_kv("predicted_hit_mass", fmt_cell(payload["predicted_hit_mass"]));
  if (payload.contains("predicted_near_inverse_m")) {
    std::printf("\npredicted vs empirical dichotomy masses:\n");
    std::printf("  near 1/m   %s vs %s\n", fmt_cell(payload["predicted_near_inverse_m"]).c_str(),
                fmt_cell(payload["frac_near_inverse_m"]).c_str());
    std::printf("  near 0     %s vs %s\n", fmt_cell(payload["predicted_near_zero"]).c_str(),
                fmt_cell(payload["frac_near_zero"]).c_str());
  }
  std::printf("\n");
  print_kv("mean_occupation_fraction", fmt_cell(payload["mean_occupation_fraction"]) +
                                           "  (stderr " +
                                           fmt_cell(payload["stderr_occupation_fraction"]) + ")");
  print_kv("total_gaps", fmt_cell(payload["total_gaps"]));
  if (payload.contains("mean_gap")) {
    std::string line = fmt_cell(payload["mean_gap"]);
    if (payload.contains("stderr_gap")) line += "  (stderr " + fmt_cell(payload["stderr_gap"]) + ")";
    print_kv("mean_gap", line);
  }
}

void emit_report(const json& report, bool json_mode) {
  if (json_mode) {
    std::fputs(ergode::canonical_json(report).c_str(), stdout);
    return;
  }
  const std::string kind = report["kind"].get<std::string>();
  std::printf("[%s]\n", kind.c_str());
  if (kind == "classify")
    render_classify(report["payload"]);
  else if (kind == "limits")
    render_limits(report["payload"]);
  else if (kind == "cesaro")
    render_cesaro(report["payload"]);
  else
    render_simulate(report["payload"]);
  print_metadata(report["metadata"]);
}

int run_classify(const std::string& file, double tol, bool json_mode) {
  const ergode::ChainSpec spec = ergode::load_chain(file, tol);
  const auto structure = ergode::communicating_classes(spec.P);
  json parameters;
  parameters["file"] = file;
  parameters["tol"] = tol;
  emit_report(make_report("classify", ergode::classify_payload(spec.space, structure),
                          std::move(parameters)),
              json_mode);
  return 0;
}

int run_limits(const std::string& file, double tol, bool transient_targets, bool json_mode) {
  const ergode::ChainSpec spec = ergode::load_chain(file, tol);
  const auto report = ergode::limit_report(spec, {}, transient_targets);
  json parameters;
  parameters["file"] = file;
  parameters["tol"] = tol;
  parameters["with_transient_targets"] = transient_targets;
  emit_report(
      make_report("limits", ergode::limits_payload(spec.space, spec, report), std::move(parameters)),
      json_mode);
  return 0;
}

int run_cesaro(const std::string& file, double tol, std::size_t n, bool json_mode) {
  const ergode::ChainSpec spec = ergode::load_chain(file, tol);
  const auto fc = ergode::finite_cesaro(spec.P, spec.mu0, n);
  std::optional<ergode::DenseMatrix> analytic;
  try {
    analytic = ergode::limit_report(spec).cesaro;
  } catch (const ergode::ErgodeError& e) {
    const int rc = exit_code_for(e.code());
    if (rc != 3) throw;  // only a solver failure downgrades to "no analytic limit"
    std::fprintf(stderr, "note: analytic limit unavailable (%s)\n", e.what());
  }
  json parameters;
  parameters["file"] = file;
  parameters["tol"] = tol;
  parameters["n"] = n;
  emit_report(make_report("cesaro",
                          ergode::cesaro_payload(spec.space, fc, analytic ? &*analytic : nullptr),
                          std::move(parameters)),
              json_mode);
  return 0;
}

struct SimulateArgs {
  std::string file;
  std::string family;
  std::vector<std::string> params;
  std::string target;
  std::size_t n = 10000;
  std::size_t paths = 1000;
  std::uint64_t seed = 0;
  std::string band = "auto";
};

std::map<std::string, double> parse_family_params(const std::vector<std::string>& params) {
  std::map<std::string, double> out;
  for (const auto& kv : params) {
    const auto eq = kv.find('=');
    std::size_t used = 0;
    double value = 0.0;
    if (eq != std::string::npos && eq > 0) {
      try {
        value = std::stod(kv.substr(eq + 1), &used);
      } catch (const std::exception&) {
        used = 0;
      }
    }
    if (eq == std::string::npos || eq == 0 || used != kv.size() - eq - 1)
      throw CLI::ValidationError("--param", "expected key=value with a numeric value: " + kv);
    out[kv.substr(0, eq)] = value;
  }
  return out;
}

int run_simulate(const SimulateArgs& args, double tol, bool json_mode) {
  ergode::ExperimentConfig config;
  config.n = args.n;
  config.paths = args.paths;
  config.seed = args.seed;
  if (args.band != "auto") {
    std::size_t used = 0;
    double band = 0.0;
    try {
      band = std::stod(args.band, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != args.band.size() || !(band > 0.0))
      throw CLI::ValidationError("--band", "expected a positive number or 'auto'");
    config.band = band;
  }

  json parameters;
  parameters["n"] = config.n;
  parameters["paths"] = config.paths;
  parameters["band"] = args.band;

  if (!args.file.empty()) {
    const ergode::ChainSpec spec = ergode::load_chain(args.file, tol);
    const std::size_t target = spec.space.index_of(args.target);
    const auto summary =
        ergode::convergence_experiment(spec, static_cast<std::int64_t>(target), config);
    json payload = ergode::simulate_payload(summary);
    payload["target_label"] = args.target;
    const double mass = summary.predicted_hit_mass.value_or(0.0);
    const double near_m = summary.inverse_m > 0.0 ? mass : 0.0;
    payload["predicted_near_inverse_m"] = near_m;
    payload["predicted_near_zero"] = 1.0 - near_m;
    parameters["file"] = args.file;
    parameters["target"] = args.target;
    parameters["tol"] = tol;
    json report = make_report("simulate", std::move(payload), std::move(parameters));
    report["metadata"]["seed"] = summary.seed;
    report["metadata"]["rng"] = summary.rng_name;
    emit_report(report, json_mode);
    return 0;
  }

  const auto chain = ergode::builtin_family(args.family, parse_family_params(args.params));
  if (!args.target.empty()) {
    std::size_t used = 0;
    long long target = 0;
    try {
      target = std::stoll(args.target, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != args.target.size())
      throw CLI::ValidationError("--target", "expected an integer state for a family");
    if (target != chain.target)
      ergode::fail(ergode::ErrorCode::ParamOutOfRange,
                   "family '" + chain.family_name + "' supports target " +
                       std::to_string(chain.target) + " only (analytic metadata is tied to it)");
  }
  const auto summary = ergode::convergence_experiment(chain, config);
  parameters["family"] = args.family;
  json family_params;
  for (const auto& [key, value] : chain.params) family_params[key] = value;
  parameters["params"] = std::move(family_params);
  parameters["target"] = chain.target;
  json report = make_report("family", ergode::simulate_payload(summary), std::move(parameters));
  report["metadata"]["seed"] = summary.seed;
  report["metadata"]["rng"] = summary.rng_name;
  emit_report(report, json_mode);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ergode: ergodic limits of discrete Markov chains, exact and simulated"};
  app.fallthrough();
  app.require_subcommand(1);

  bool json_mode = false;
  double tol = ergode::kDefaultRowTol;
  app.add_flag("--json", json_mode, "emit the report as canonical JSON");
  app.add_option("--tol", tol, "row-sum validation tolerance")->check(CLI::PositiveNumber);

  auto* classify = app.add_subcommand("classify", "communicating classes and state classification");
  std::string classify_file;
  classify->add_option("file", classify_file, "chain JSON file")->required();

  auto* limits = app.add_subcommand("limits", "exact ergodic limits (f, m, A, o, pathwise law)");
  std::string limits_file;
  bool transient_targets = false;
  bool table_mode = false;
  limits->add_option("file", limits_file, "chain JSON file")->required();
  limits->add_flag("--with-transient-targets", transient_targets,
                   "also solve f columns for transient targets");
  limits->add_flag("--table", table_mode, "human-readable table output (default)");

  auto* cesaro = app.add_subcommand("cesaro", "finite-n Cesaro averages and deviation from A");
  std::string cesaro_file;
  std::size_t cesaro_n = 10000;
  cesaro->add_option("file", cesaro_file, "chain JSON file")->required();
  cesaro->add_option("--n", cesaro_n, "horizon (number of steps)")
      ->check(CLI::PositiveNumber);

  auto* simulate = app.add_subcommand("simulate", "seeded occupation-fraction experiment");
  SimulateArgs sim;
  simulate->add_option("file", sim.file, "chain JSON file (omit when using --family)");
  simulate->add_option("--family", sim.family, "generator family name (srw_z, reflecting_bd)");
  simulate->add_option("--param", sim.params, "family parameter key=value (repeatable)");
  simulate->add_option("--target", sim.target, "target state (label for files, integer for families)");
  simulate->add_option("--n", sim.n, "steps per path")->check(CLI::PositiveNumber);
  simulate->add_option("--paths", sim.paths, "number of paths")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "base RNG seed");
  simulate->add_option("--band", sim.band, "occupation band (positive number or 'auto')");

  try {
    app.parse(argc, argv);
    if (simulate->parsed()) {
      if (sim.file.empty() == sim.family.empty())
        throw CLI::ValidationError("simulate", "provide exactly one of <file> or --family");
      if (!sim.file.empty() && sim.target.empty())
        throw CLI::ValidationError("simulate", "--target is required for file chains");
    }
    if (limits->parsed() && table_mode && json_mode)
      throw CLI::ValidationError("limits", "--table conflicts with --json");
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;  // usage errors are exit 1; help/version exit 0
  }

  const auto start = std::chrono::steady_clock::now();
  int rc = 0;
  try {
    if (classify->parsed())
      rc = run_classify(classify_file, tol, json_mode);
    else if (limits->parsed())
      rc = run_limits(limits_file, tol, transient_targets, json_mode);
    else if (cesaro->parsed())
      rc = run_cesaro(cesaro_file, tol, cesaro_n, json_mode);
    else
      rc = run_simulate(sim, tol, json_mode);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;  // late usage errors (bad --band / --param / --target forms)
  } catch (const ergode::ErgodeError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  const std::chrono::duration<double, std::milli> elapsed =
      std::chrono::steady_clock::now() - start;
  std::fprintf(stderr, "wall time: %.3f ms\n", elapsed.count());
  return rc;
}
