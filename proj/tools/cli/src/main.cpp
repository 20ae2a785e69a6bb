#include <iostream>

#include <CLI11.hpp>

#include "topoclock/cli/config.hpp"
#include "topoclock/cli/run.hpp"
#include "topoclock/error.hpp"

int main(int argc, char** argv) {
  namespace tc = topoclock::cli;
  CLI::App app{"Tilted SSH / Rice-Mele lattice clock simulator"};
  app.set_version_flag("--version", std::string(TOPOCLOCK_VERSION));
  app.require_subcommand(1);

  std::string config_path;
  std::string out;
  std::uint64_t seed = 0;
  std::size_t realizations = 0;
  unsigned workers = 0;
  std::vector<std::string> sets;

  const auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config with flat dotted keys")->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory");
    sub->add_option("--seed", seed, "noise seed");
    sub->add_option("--realizations", realizations, "noise realizations");
    sub->add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--set", sets, "override a parameter, key=value (repeatable)");
  };
  for (const auto& kind : tc::kKinds) add_common(app.add_subcommand(kind, "run the " + kind + " experiment"));

  CLI11_PARSE(app, argc, argv);
  CLI::App* sub = app.get_subcommands().front();

  tc::Overrides flags;
  flags.kind = sub->get_name();
  if (sub->count("--out")) flags.out = out;
  if (sub->count("--seed")) flags.seed = seed;
  if (sub->count("--realizations")) flags.realizations = realizations;
  if (sub->count("--workers")) flags.workers = workers;
  flags.assignments = sets;

  tc::RunConfig cfg;
  try {
    std::optional<std::filesystem::path> file;
    if (!config_path.empty()) file = config_path;
    cfg = tc::parse_config(file, flags);
  } catch (const topoclock::Error& e) {
    std::cerr << "topoclock: " << e.what() << "\n";
    return 2;
  }
  return tc::run(cfg, std::cout, std::cerr);
}
