#include <CLI11.hpp>

#include <iostream>
#include <string>

#include "nslog/cli/commands.hpp"
#include "nslog/cli/config.hpp"
#include "nslog/cli/output.hpp"
#include "nslog/error.hpp"
#include "nslog/parallel.hpp"

int main(int argc, char** argv) {
  using namespace nslog::cli;
  CLI::App app{"Log-ladder Navier-Stokes toolkit"};
  app.set_version_flag("--version", std::string(kToolVersion));
  app.require_subcommand(1);

  std::string config_path, out_dir, verify;
  std::uint64_t seed = 0;
  for (const char* name : {"formulas", "ode", "simulate", "analyze", "audit", "sweep"}) {
    auto* sub = app.add_subcommand(name, std::string("run the ") + name + " mode");
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--out", out_dir, "output directory (overrides run.out_dir)");
    sub->add_option("--seed", seed, "RNG seed (overrides run.seed)");
    sub->add_option("--verify", verify, "manifest whose output digests must match");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kConfigFailure;
  }
  const std::string mode_name = app.get_subcommands().front()->get_name();

  nslog::par::init_from_env();
  RunConfig cfg;
  try {
    cfg = parse_config(read_file(config_path));
  } catch (const std::exception& e) {
    std::cerr << "nslog: " << config_path << ": " << e.what() << "\n";
    return exit_code_for(e);
  }
  if (to_string(cfg.mode) != mode_name) {
    std::cerr << "nslog: config declares mode '" << to_string(cfg.mode) << "' but '" << mode_name
              << "' was requested\n";
    return kConfigFailure;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (app.get_subcommands().front()->count("--seed")) cfg.seed = seed;

  const RunOutcome r = execute(cfg, RunOptions{verify});
  if (r.exit_code != kOk) std::cerr << "nslog: " << r.error << "\n";
  else std::cout << "wrote " << r.outputs.size() << " files and " << r.manifest_path << "\n";
  return r.exit_code;
}
