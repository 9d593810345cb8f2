#include "ergode/chain_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "ergode/errors.hpp"

namespace ergode {

using nlohmann::json;

namespace {

std::map<std::string, double> parse_weight_object(const json& obj, const std::string& where) {
  if (!obj.is_object()) fail(ErrorCode::BadChainFile, "'" + where + "' must be a JSON object");
  std::map<std::string, double> out;
  for (const auto& [key, value] : obj.items()) {
    if (!value.is_number())
      fail(ErrorCode::BadChainFile, "'" + where + "." + key + "' must be a number");
    out[key] = value.get<double>();
  }
  return out;
}

}  // namespace

RawChain parse_chain_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    fail(ErrorCode::BadChainFile, err.what());
  }
  if (!doc.is_object()) fail(ErrorCode::BadChainFile, "chain file must be a JSON object");

  for (const auto& [key, _] : doc.items()) {
    if (key != "states" && key != "transitions" && key != "initial" && key != "g")
      fail(ErrorCode::BadChainFile, "unknown top-level key '" + key + "'");
  }
  for (const char* required : {"states", "transitions", "initial"}) {
    if (!doc.contains(required))
      fail(ErrorCode::BadChainFile, std::string("missing required key '") + required + "'");
  }

  RawChain raw;
  if (!doc["states"].is_array()) fail(ErrorCode::BadChainFile, "'states' must be an array of strings");
  for (const auto& s : doc["states"]) {
    if (!s.is_string()) fail(ErrorCode::BadChainFile, "'states' must be an array of strings");
    raw.states.push_back(s.get<std::string>());
  }

  if (!doc["transitions"].is_object())
    fail(ErrorCode::BadChainFile, "'transitions' must be an object");
  for (const auto& [from, row] : doc["transitions"].items())
    raw.transitions[from] = parse_weight_object(row, "transitions." + from);

  raw.initial = parse_weight_object(doc["initial"], "initial");
  if (doc.contains("g")) raw.g = parse_weight_object(doc["g"], "g");
  return raw;
}

RawChain load_chain_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::BadChainFile, "cannot open chain file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_chain_json(buf.str());
}

ChainSpec load_chain(const std::string& path, double row_tol) {
  return validate_chain(load_chain_file(path), row_tol);
}

std::string chain_to_json(const ChainSpec& spec) {
  const RawChain raw = to_raw(spec);
  json doc;
  doc["states"] = raw.states;
  doc["transitions"] = json::object();
  for (const auto& [from, row] : raw.transitions) {
    json jrow = json::object();
    for (const auto& [to, p] : row) jrow[to] = p;
    doc["transitions"][from] = jrow;
  }
  doc["initial"] = json::object();
  for (const auto& [label, w] : raw.initial) doc["initial"][label] = w;
  if (!raw.g.empty()) {
    doc["g"] = json::object();
    for (const auto& [label, v] : raw.g) doc["g"][label] = v;
  }
  return doc.dump(2) + "\n";
}

}  // namespace ergode
