#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mcfqkd/cli/config.hpp"

namespace mcfqkd::cli {

/// Environment variable naming the output directory when neither the flag
/// nor the config file sets one.
inline constexpr const char* kOutputDirEnv = "MCFQKD_OUTPUT_DIR";
inline constexpr const char* kDefaultOutputDir = "mcfqkd-out";

/// Command-line values; each one set here wins over the config file.
struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
  bool plot = false;
};

struct RunSummary {
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // names relative to output_dir, in write order
};

/// flag > config file > $MCFQKD_OUTPUT_DIR > "mcfqkd-out"
std::filesystem::path resolve_output_dir(const RunConfig& config, const RunOverrides& overrides);

/// Executes a validated configuration and writes its artifacts.
/// Throws ConfigError (missing seed), bpm::NumericalError and std::exception
/// for I/O failures.
RunSummary run(const RunConfig& config, const RunOverrides& overrides, std::ostream& log);

/// Maps an exception from run()/load to the documented exit status.
int exit_status_for(const std::exception& e);

}  // namespace mcfqkd::cli
