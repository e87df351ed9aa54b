// mcfqkd: command-line front end.
//
//   mcfqkd run CONFIG.json [--seed N] [--output-dir DIR] [--plot]
//   mcfqkd validate CONFIG.json
//
// Exit status: 0 success, 1 configuration error, 2 numerical or I/O failure.

#include <cstdint>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "mcfqkd/cli/config.hpp"
#include "mcfqkd/cli/run.hpp"

using namespace mcfqkd::cli;

namespace {

void print(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) std::cerr << to_string(d) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Crosstalk, phase-noise and key-loss threshold simulator for multicore-fiber QKD"};
  app.require_subcommand(1);

  std::string run_path;
  std::uint64_t seed = 0;
  std::string output_dir;
  bool plot = false;
  auto* run_cmd = app.add_subcommand("run", "Run a configuration and write its CSV/JSON/SVG artifacts");
  run_cmd->add_option("config", run_path, "JSON run configuration")->required();
  auto* seed_opt = run_cmd->add_option("--seed", seed, "64-bit seed (required by Monte-Carlo commands)");
  auto* dir_opt = run_cmd->add_option("--output-dir", output_dir,
                                      std::string("Output directory (default: config, then $") + kOutputDirEnv +
                                          ", then " + kDefaultOutputDir + ")");
  run_cmd->add_flag("--plot", plot, "Also write SVG line plots");

  std::string validate_path;
  auto* val_cmd = app.add_subcommand("validate", "Check a configuration without running it");
  val_cmd->add_option("config", validate_path, "JSON run configuration")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  if (*val_cmd) {
    const ParseResult r = load_config(validate_path);
    print(r.diagnostics);
    if (r.ok()) std::cout << "configuration OK (" << r.diagnostics.size() << " warning(s))\n";
    return r.ok() ? 0 : 1;
  }

  const ParseResult r = load_config(run_path);
  print(r.diagnostics);
  if (!r.ok()) return 1;
  RunOverrides overrides;
  if (*seed_opt) overrides.seed = seed;
  if (*dir_opt) overrides.output_dir = output_dir;
  overrides.plot = plot;
  try {
    run(r.config, overrides, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_status_for(e);
  }
  return 0;
}
