#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "topoclock/cli/config.hpp"

namespace topoclock::cli {

// Collects the files an experiment writes so the manifest can list them.
class Artifacts {
 public:
  explicit Artifacts(std::filesystem::path dir) : dir_(std::move(dir)) {}

  void write_text(const std::string& name, const std::string& content);
  void write_json(const std::string& name, const nlohmann::json& content);
  const std::vector<std::string>& files() const noexcept { return files_; }
  const std::filesystem::path& dir() const noexcept { return dir_; }

 private:
  std::filesystem::path dir_;
  std::vector<std::string> files_;
};

void run_winding(const RunConfig& cfg, Artifacts& out, std::ostream& log);
void run_md_scan(const RunConfig& cfg, Artifacts& out, std::ostream& log);
void run_ix_scan(const RunConfig& cfg, Artifacts& out, std::ostream& log);
void run_clock(const RunConfig& cfg, Artifacts& out, std::ostream& log);
void run_mwi(const RunConfig& cfg, Artifacts& out, std::ostream& log);
void run_sensitivity(const RunConfig& cfg, Artifacts& out, std::ostream& log);
// Returns false when any check fails.
bool run_validate(const RunConfig& cfg, Artifacts& out, std::ostream& log);

// Dispatches on cfg.kind and writes manifest.json. Returns the exit status;
// module errors are reported on err with the experiment name.
int run(const RunConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace topoclock::cli
