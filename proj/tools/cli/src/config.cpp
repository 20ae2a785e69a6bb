#include "topoclock/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>

#include "topoclock/error.hpp"
#include "topoclock/units.hpp"

namespace topoclock::cli {

namespace {

using json = nlohmann::json;

enum class Type { number, hz, integer, boolean, text, numbers, texts };

struct Key {
  Type type;
  json fallback;
  double min = -HUGE_VAL;  // inclusive lower bound for numbers and list entries
  bool positive = false;   // strict
};

// section -> key -> spec
const std::map<std::string, std::map<std::string, Key>>& schema() {
  static const std::map<std::string, std::map<std::string, Key>> s{
      {"winding",
       {{"winding.ratios", {Type::numbers, {0.3, 0.5, 2.0, 3.0}, 0.0, true}},
        {"winding.carrier_hz", {Type::hz, 5.0, 0.0, true}},
        {"winding.points", {Type::integer, 4096, 8}},
        {"winding.band_points", {Type::integer, 512, 8}}}},
      {"md",
       {{"md.ratios", {Type::numbers, {0.3, 1.0, 3.0}, 0.0, true}},
        {"md.sideband_hz", {Type::hz, 10.0, 0.0, true}},
        {"md.sites", {Type::integer, 64, 4}},
        {"md.max_phase", {Type::number, 40.0, 0.0, true}},  // Omega_B T_max / pi
        {"md.plateau_start", {Type::number, 20.0, 0.0}},
        {"md.samples_per_period", {Type::integer, 100, 10}},
        {"md.edge_guard", {Type::boolean, true}}}},
      {"ix",
       {{"ix.ratios", {Type::numbers, {0.3, 3.0}, 0.0, true}},
        {"ix.sideband_hz", {Type::hz, 10.0, 0.0, true}},
        {"ix.sites", {Type::integer, 64, 4}},
        {"ix.hold_phase", {Type::number, 1.0, 0.0, true}},  // Omega_B t / pi
        {"ix.detuning_max", {Type::number, 0.1, 0.0, true}},  // delta / Omega_B
        {"ix.points", {Type::integer, 21, 3}},
        {"ix.tilt", {Type::number, 0.0}}}},  // delta_t / Omega_B
      {"clock",
       {{"clock.carrier_hz", {Type::hz, 5.0, 0.0, true}},
        {"clock.sideband_hz", {Type::hz, 10.0, 0.0, true}},
        {"clock.sites", {Type::integer, 64, 4}},
        {"clock.atoms", {Type::numbers, {10.0, 100.0, 1000.0}, 1.0}}}},
      {"noise",
       {{"noise.amplitude", {Type::number, 0.01, 0.0}},
        {"noise.phase", {Type::number, 0.005, 0.0}},
        {"noise.tilt", {Type::number, 0.001, 0.0}},
        {"noise.independent_tones", {Type::boolean, false}}}},
      {"mwi",
       {{"mwi.protocols", {Type::texts, {"P0", "P1", "P2", "TPP12", "TPP5"}}},
        {"mwi.tilt", {Type::number, 0.01}},  // rad/s
        {"mwi.pulse_mode", {Type::text, "ideal"}},
        {"mwi.stark", {Type::boolean, true}},
        {"mwi.guard_sites", {Type::integer, 6, 1}}}},
  };
  return s;
}

std::vector<std::string> sections_for(const std::string& kind) {
  if (kind == "winding") return {"winding"};
  if (kind == "md-scan") return {"md"};
  if (kind == "ix-scan") return {"ix"};
  if (kind == "clock" || kind == "sensitivity") return {"clock", "noise"};
  if (kind == "mwi") return {"mwi", "noise"};
  return {};
}

const Key* find_key(const std::string& name) {
  for (const auto& [section, keys] : schema()) {
    if (auto it = keys.find(name); it != keys.end()) return &it->second;
  }
  return nullptr;
}

[[noreturn]] void fail(const std::string& key, const std::string& message) {
  throw InvalidArgument("config: " + key + ": " + message);
}

void flatten(const json& node, const std::string& prefix, json& out) {
  for (const auto& [k, v] : node.items()) {
    const std::string name = prefix.empty() ? k : prefix + "." + k;
    if (v.is_object()) {
      flatten(v, name, out);
    } else {
      out[name] = v;
    }
  }
}

void check_number(const std::string& key, const json& v, const Key& spec) {
  if (!v.is_number()) fail(key, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) fail(key, "must be finite");
  if (spec.positive && !(x > spec.min)) fail(key, "must be greater than " + json(spec.min).dump());
  if (!spec.positive && x < spec.min) fail(key, "must be at least " + json(spec.min).dump());
}

void check_value(const std::string& key, const json& v, const Key& spec) {
  switch (spec.type) {
    case Type::number:
    case Type::hz:
      check_number(key, v, spec);
      break;
    case Type::integer:
      if (!v.is_number_integer()) fail(key, "expected an integer");
      check_number(key, v, spec);
      break;
    case Type::boolean:
      if (!v.is_boolean()) fail(key, "expected true or false");
      break;
    case Type::text:
      if (!v.is_string()) fail(key, "expected a string");
      break;
    case Type::numbers:
      if (!v.is_array() || v.empty()) fail(key, "expected a non-empty list of numbers");
      for (std::size_t i = 0; i < v.size(); ++i) check_number(key + "[" + std::to_string(i) + "]", v[i], spec);
      break;
    case Type::texts:
      if (!v.is_array() || v.empty()) fail(key, "expected a non-empty list of strings");
      for (const auto& s : v) {
        if (!s.is_string()) fail(key, "expected a list of strings");
      }
      break;
  }
}

json parse_assignment_value(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error&) {
    return text;  // bare words are strings
  }
}

template <class T>
T require_count(const json& v, const char* key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) fail(key, "expected a non-negative integer");
  return v.get<T>();
}

}  // namespace

json default_parameters(const std::string& kind) {
  json out = json::object();
  for (const auto& section : sections_for(kind)) {
    for (const auto& [name, spec] : schema().at(section)) out[name] = spec.fallback;
  }
  if (kind == "mwi") out["noise.amplitude"] = 0.02, out["noise.phase"] = 0.0, out["noise.tilt"] = 0.0;
  return out;
}

RunConfig parse_config_document(const json& document, const Overrides& flags) {
  if (!document.is_object()) throw InvalidArgument("config: top level must be a JSON object");
  json flat = json::object();
  flatten(document, "", flat);
  for (const auto& a : flags.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos || eq == 0) throw InvalidArgument("config: expected key=value, got '" + a + "'");
    flat[a.substr(0, eq)] = parse_assignment_value(a.substr(eq + 1));
  }

  RunConfig cfg;
  if (flags.kind) {
    cfg.kind = *flags.kind;
  } else if (flat.contains("kind")) {
    if (!flat["kind"].is_string()) fail("kind", "expected a string");
    cfg.kind = flat["kind"].get<std::string>();
  } else {
    fail("kind", "missing required field");
  }
  if (std::find(kKinds.begin(), kKinds.end(), cfg.kind) == kKinds.end()) fail("kind", "unknown kind '" + cfg.kind + "'");

  if (flat.contains("out")) {
    if (!flat["out"].is_string()) fail("out", "expected a path string");
    cfg.out = flat["out"].get<std::string>();
  }
  if (flat.contains("seed")) cfg.seed = require_count<std::uint64_t>(flat["seed"], "seed");
  if (flat.contains("realizations")) cfg.realizations = require_count<std::size_t>(flat["realizations"], "realizations");
  if (flat.contains("workers")) cfg.workers = require_count<unsigned>(flat["workers"], "workers");
  if (const char* env = std::getenv("TOPOCLOCK_WORKERS"); env && *env) {
    char* end = nullptr;
    const long w = std::strtol(env, &end, 10);
    if (*end != '\0' || w < 1) throw InvalidArgument("TOPOCLOCK_WORKERS: expected a positive integer");
    cfg.workers = static_cast<unsigned>(w);
  }
  if (flags.out) cfg.out = *flags.out;
  if (flags.seed) cfg.seed = *flags.seed;
  if (flags.realizations) cfg.realizations = *flags.realizations;
  if (flags.workers) cfg.workers = *flags.workers;
  if (cfg.workers < 1) fail("workers", "must be at least 1");

  cfg.params = default_parameters(cfg.kind);
  static const std::set<std::string> common{"kind", "out", "seed", "realizations", "workers"};
  for (const auto& [key, value] : flat.items()) {
    if (common.count(key)) continue;
    const Key* spec = find_key(key);
    if (!spec) fail(key, "unknown key");
    if (!cfg.params.contains(key)) fail(key, "does not apply to kind '" + cfg.kind + "'");
    check_value(key, value, *spec);
    cfg.params[key] = value;
  }

  if (cfg.kind == "clock" || cfg.kind == "sensitivity") {
    if (!(cfg.number("clock.sideband_hz") > cfg.number("clock.carrier_hz"))) {
      fail("clock.sideband_hz", "must exceed clock.carrier_hz (topological side)");
    }
  }
  if (cfg.kind == "mwi") {
    static const std::set<std::string> known{"P0", "P1", "P2", "TPP12", "TPP5"};
    for (const auto& p : cfg.texts("mwi.protocols")) {
      if (!known.count(p)) fail("mwi.protocols", "unknown protocol '" + p + "'");
    }
    const auto mode = cfg.text("mwi.pulse_mode");
    if (mode != "ideal" && mode != "finite") fail("mwi.pulse_mode", "expected 'ideal' or 'finite'");
  }
  if (cfg.kind == "clock" || cfg.kind == "mwi") {
    if (cfg.noise_enabled() && !cfg.seed) fail("seed", "required when noise is enabled");
    if (cfg.noise_enabled() && cfg.realizations < 2) fail("realizations", "need at least 2 with noise enabled");
  }

  std::error_code ec;
  std::filesystem::create_directories(cfg.out, ec);
  if (ec || !std::filesystem::is_directory(cfg.out)) fail("out", "cannot create directory " + cfg.out.string());
  const auto probe = cfg.out / ".topoclock-write-test";
  {
    std::ofstream f(probe);
    if (!f) fail("out", "directory " + cfg.out.string() + " is not writable");
  }
  std::filesystem::remove(probe, ec);
  return cfg;
}

RunConfig parse_config(const std::optional<std::filesystem::path>& file, const Overrides& flags) {
  json document = json::object();
  if (file) {
    std::ifstream f(*file);
    if (!f) throw InvalidArgument("config: cannot read " + file->string());
    try {
      document = json::parse(f);
    } catch (const json::parse_error& e) {
      throw InvalidArgument("config: " + file->string() + ": " + e.what());
    }
  }
  return parse_config_document(document, flags);
}

double RunConfig::number(const std::string& key) const {
  if (!params.contains(key)) fail(key, "not set");
  return params.at(key).get<double>();
}

double RunConfig::hz(const std::string& key) const { return hz_to_angular(number(key)); }

int RunConfig::integer(const std::string& key) const {
  if (!params.contains(key)) fail(key, "not set");
  return params.at(key).get<int>();
}

bool RunConfig::flag(const std::string& key) const {
  if (!params.contains(key)) fail(key, "not set");
  return params.at(key).get<bool>();
}

std::string RunConfig::text(const std::string& key) const {
  if (!params.contains(key)) fail(key, "not set");
  return params.at(key).get<std::string>();
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
  if (!params.contains(key)) fail(key, "not set");
  return params.at(key).get<std::vector<double>>();
}

std::vector<std::string> RunConfig::texts(const std::string& key) const {
  if (!params.contains(key)) fail(key, "not set");
  return params.at(key).get<std::vector<std::string>>();
}

bool RunConfig::noise_enabled() const {
  if (!params.contains("noise.amplitude")) return false;
  return noise().enabled();
}

NoiseSpec RunConfig::noise() const {
  NoiseSpec s;
  s.amplitude = number("noise.amplitude");
  s.phase = number("noise.phase");
  s.tilt = number("noise.tilt");
  s.independent_tones = flag("noise.independent_tones");
  s.seed = seed.value_or(0);
  return s;
}

json RunConfig::echo() const {
  json j = params;
  j["kind"] = kind;
  j["seed"] = seed ? json(*seed) : json(nullptr);
  j["realizations"] = realizations;
  return j;
}

}  // namespace topoclock::cli
