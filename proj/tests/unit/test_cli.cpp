#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "topoclock/cli/config.hpp"
#include "topoclock/cli/run.hpp"
#include "topoclock/error.hpp"

using namespace topoclock;
using namespace topoclock::cli;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("topoclock_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

std::string error_of(const json& doc, const Overrides& flags = {}) {
  try {
    parse_config_document(doc, flags);
  } catch (const InvalidArgument& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("minimal configs parse with defaults") {
  unsetenv("TOPOCLOCK_WORKERS");
  const auto dir = scratch("min");
  const auto cfg = parse_config_document(json{{"kind", "winding"}, {"out", dir.string()}, {"winding.ratios", {0.3, 3}}}, {});
  CHECK(cfg.kind == "winding");
  CHECK(cfg.numbers("winding.ratios") == std::vector<double>{0.3, 3.0});
  CHECK(cfg.integer("winding.points") == 4096);
  CHECK(cfg.hz("winding.carrier_hz") == doctest::Approx(2 * 3.141592653589793 * 5.0));
  CHECK(cfg.workers == 1);

  // nested objects flatten to dotted keys
  const auto nested = parse_config_document(json{{"kind", "md-scan"}, {"out", dir.string()}, {"md", {{"sites", 96}}}}, {});
  CHECK(nested.integer("md.sites") == 96);
}

TEST_CASE("validation errors name the field") {
  unsetenv("TOPOCLOCK_WORKERS");
  const auto out = scratch("err").string();
  CHECK(error_of({{"kind", "md-scan"}, {"out", out}, {"md.sideband_hz", -10.0}}).find("md.sideband_hz") !=
        std::string::npos);
  CHECK(error_of({{"kind", "md-scan"}, {"out", out}, {"md.bogus", 1}}).find("md.bogus: unknown key") !=
        std::string::npos);
  CHECK(error_of({{"kind", "winding"}, {"out", out}, {"md.sites", 64}}).find("does not apply") != std::string::npos);
  CHECK(error_of({{"out", out}}).find("kind: missing required field") != std::string::npos);
  CHECK(error_of({{"kind", "nope"}, {"out", out}}).find("unknown kind") != std::string::npos);
  CHECK(error_of({{"kind", "ix-scan"}, {"out", out}, {"ix.ratios", {1.0, std::numeric_limits<double>::infinity()}}}).find("ix.ratios[1]") !=
        std::string::npos);
  CHECK(error_of({{"kind", "md-scan"}, {"out", out}, {"md.sites", 6.5}}).find("md.sites: expected an integer") !=
        std::string::npos);
  // noise needs a seed
  CHECK(error_of({{"kind", "clock"}, {"out", out}}).find("seed: required") != std::string::npos);
  CHECK(error_of({{"kind", "clock"}, {"out", out}, {"noise.amplitude", 0.0}, {"noise.phase", 0.0},
                  {"noise.tilt", 0.0}})
            .empty());
  CHECK(error_of({{"kind", "mwi"}, {"out", out}, {"seed", 1}, {"mwi.protocols", {"P9"}}}).find("P9") !=
        std::string::npos);
}

TEST_CASE("flags override file values") {
  unsetenv("TOPOCLOCK_WORKERS");
  const auto out = scratch("flags");
  const auto file = fs::temp_directory_path() / "topoclock_cli_test_config.json";
  std::ofstream(file) << json{{"kind", "clock"}, {"seed", 5}, {"out", out.string()}, {"workers", 3}}.dump();
  Overrides flags;
  flags.seed = 9;
  flags.assignments = {"clock.sites=96", "noise.amplitude=0.02"};
  const auto cfg = parse_config(file, flags);
  CHECK(*cfg.seed == 9);
  CHECK(cfg.integer("clock.sites") == 96);
  CHECK(cfg.noise().amplitude == 0.02);
  CHECK(cfg.workers == 3);

  setenv("TOPOCLOCK_WORKERS", "2", 1);
  CHECK(parse_config(file, {}).workers == 2);
  flags.workers = 4;
  CHECK(parse_config(file, flags).workers == 4);
  unsetenv("TOPOCLOCK_WORKERS");
  CHECK_THROWS_AS(parse_config(fs::path("/nonexistent/config.json"), {}), InvalidArgument);
}

TEST_CASE("runs write a manifest that lists every file and rerun byte-identically") {
  unsetenv("TOPOCLOCK_WORKERS");
  const auto a = scratch("run_a");
  const auto b = scratch("run_b");
  const json doc{{"kind", "clock"}, {"seed", 4}, {"realizations", 16}, {"clock.sites", 48}};
  auto ca = parse_config_document(doc, Overrides{.out = a.string()});
  auto cb = parse_config_document(doc, Overrides{.out = b.string(), .workers = 3});
  std::ostringstream log, err;
  REQUIRE(run(ca, log, err) == 0);
  REQUIRE(run(cb, log, err) == 0);

  const auto manifest = json::parse(slurp(a / "manifest.json"));
  CHECK(manifest["seed"] == 4);
  CHECK(manifest["config"]["clock.sites"] == 48);
  std::set<std::string> listed;
  for (const auto& f : manifest["files"]) listed.insert(f.get<std::string>());
  std::set<std::string> present;
  for (const auto& e : fs::directory_iterator(a)) {
    if (e.path().filename() != "manifest.json") present.insert(e.path().filename().string());
  }
  CHECK(listed == present);
  CHECK(listed.count("clock_ensemble.csv") == 1);
  for (const auto& f : listed) CHECK(slurp(a / f) == slurp(b / f));

  const auto summary = json::parse(slurp(a / "clock.json"));
  CHECK(summary["parameters"]["clock.sideband_rad_s"].get<double>() == doctest::Approx(62.83185307));
  CHECK(summary["parameters"]["clock.sideband_hz"] == 10.0);
}

TEST_CASE("module errors give a nonzero exit and a diagnostic") {
  unsetenv("TOPOCLOCK_WORKERS");
  const auto dir = scratch("leak");
  const auto cfg = parse_config_document(json{{"kind", "md-scan"}, {"md.sites", 8}, {"md.ratios", {3.0}}},
                                Overrides{.out = dir.string()});
  std::ostringstream log, err;
  CHECK(run(cfg, log, err) == 1);
  CHECK(err.str().find("md-scan") != std::string::npos);
  CHECK(err.str().find("edge leakage") != std::string::npos);
  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["status"] == 1);
}

TEST_CASE("winding and validate experiments") {
  unsetenv("TOPOCLOCK_WORKERS");
  const auto dir = scratch("winding");
  std::ostringstream log, err;
  const auto cfg = parse_config_document(json{{"kind", "winding"}, {"winding.ratios", {0.5, 1.0, 2.0}}},
                                Overrides{.out = dir.string()});
  REQUIRE(run(cfg, log, err) == 0);
  const auto csv = slurp(dir / "winding.csv");
  CHECK(csv.find("r,winding_raw,winding,zak_phase") != std::string::npos);
  const auto row = csv.substr(csv.find("\n2,") + 1);
  CHECK(row.substr(0, row.find('\n')).find(",1,-3.14159") != std::string::npos);
  CHECK(csv.find("\n1,nan,nan,nan") != std::string::npos);
  CHECK(fs::exists(dir / "band_r0.5.csv"));

  const auto vdir = scratch("validate");
  const auto vcfg = parse_config_document(json{{"kind", "validate"}}, Overrides{.out = vdir.string()});
  CHECK(run(vcfg, log, err) == 0);
  CHECK(log.str().find("FAIL") == std::string::npos);
}
