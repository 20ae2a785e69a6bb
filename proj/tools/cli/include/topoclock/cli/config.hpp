#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "topoclock/noise.hpp"

namespace topoclock::cli {

inline const std::vector<std::string> kKinds{"winding", "md-scan", "ix-scan", "clock",
                                             "mwi",     "sensitivity", "validate"};

// Parameters are kept flat under dotted keys ("md.sites"). Frequencies are in
// Hz here; experiments convert with hz().
struct RunConfig {
  std::string kind;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  std::size_t realizations = 100;
  unsigned workers = 1;
  nlohmann::json params = nlohmann::json::object();

  double number(const std::string& key) const;
  double hz(const std::string& key) const;  // rad/s
  int integer(const std::string& key) const;
  bool flag(const std::string& key) const;
  std::string text(const std::string& key) const;
  std::vector<double> numbers(const std::string& key) const;
  std::vector<std::string> texts(const std::string& key) const;

  bool noise_enabled() const;
  NoiseSpec noise() const;  // seed 0 when absent

  // Every key with its value plus kind, seed and realizations; the output
  // directory and worker count stay out so reruns elsewhere compare equal.
  nlohmann::json echo() const;
};

// Command-line values. Unset members leave the file value in place.
struct Overrides {
  std::optional<std::string> kind;
  std::optional<std::string> out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> realizations;
  std::optional<unsigned> workers;
  std::vector<std::string> assignments;  // "key=value"
};

// Reads the file (when given), applies TOPOCLOCK_WORKERS, then the flags,
// fills defaults for the kind and validates.
RunConfig parse_config(const std::optional<std::filesystem::path>& file, const Overrides& flags);
RunConfig parse_config_document(const nlohmann::json& document, const Overrides& flags);

// Defaults of every parameter key that applies to kind.
nlohmann::json default_parameters(const std::string& kind);

}  // namespace topoclock::cli
