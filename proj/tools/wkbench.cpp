#include "wkb/commands.hpp"
#include "wkb/config.hpp"
#include "wkb/error.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <map>

int main(int argc, char** argv) {
  CLI::App app{"wkbench: semiclassical NLS / WKB limit workbench"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  app.add_option("--config", config_path, "INI configuration file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "output directory (overrides [output] directory)");
  app.add_option("--seed", seed, "reserved; every command is deterministic");
  const std::map<std::string, std::string> help{
      {"simulate", "semiclassical NLS run with invariants"},
      {"limit", "eikonal/transport (Euler) run with invariants"},
      {"corrector", "first corrector phi1, a1 on the limit run"},
      {"sweep", "epsilon ladder: WKB errors, uniform bounds, rate fits"},
      {"conserve", "NLS and Euler conservation-law drifts"},
      {"blowup", "limit run to the horizon with breakdown detection"},
      {"focusing-demo", "perturbation growth, focusing vs defocusing sign"},
      {"report", "list artifacts in the output directory and verify their hashes"}};
  for (const auto& name : wkb::command_names()) app.add_subcommand(name, help.at(name))->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? wkb::exit_ok : wkb::exit_config;
  }

  int status = wkb::exit_ok;
  try {
    const wkb::RunConfig config = config_path.empty() ? wkb::RunConfig{} : wkb::load_config(config_path);
    wkb::CommandContext ctx;
    ctx.output_directory = out_dir.empty() ? config.output_directory : out_dir;
    ctx.seed = seed;
    if (const char* w = std::getenv("WKBENCH_WORKERS")) ctx.workers = std::max(1, std::atoi(w));
    const std::string command = app.get_subcommands().front()->get_name();
    for (const auto& p : wkb::run_command(command, config, ctx, std::cout))
      std::cout << "wrote " << p.string() << "\n";
  } catch (...) {
    std::cerr << wkb::error_record(std::current_exception(), status) << std::endl;
  }
  return status;
}
