// Run configuration: JSON document -> typed parameters plus diagnostics.
//
// {
//   "command": "threshold",
//   "seed": 7,                      optional, Monte-Carlo commands need one
//   "output_dir": "out",            optional
//   "parameters": { ... }           sections listed in README.md
// }

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "mcfqkd/bpm/fiber.hpp"
#include "mcfqkd/visibility.hpp"

namespace mcfqkd::cli {

enum class Command { Visibility, Threshold, PsrSweep, PsrMap, SnrCurve, BpmCrosstalk, TrenchStudy };
const char* to_string(Command c);
std::optional<Command> command_from_string(const std::string& s);

enum class ThresholdMethod { ClosedForm, Bisection, MonteCarlo };
const char* to_string(ThresholdMethod m);

struct Diagnostic {
  enum class Level { Error, Warning };
  Level level = Level::Error;
  std::string key;  // dotted path, e.g. parameters.sigma_hz
  std::string message;
};
std::string to_string(const Diagnostic& d);

/// Configuration problem; exit status 1.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  Command command = Command::Threshold;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;

  std::vector<CrosstalkScene> scenes;  // visibility accepts several, the rest use scenes[0]
  std::vector<double> sigma_hz{0.0};
  std::size_t n_samples = 100000;
  double baseline_qber = 0.0;
  ThresholdMethod method = ThresholdMethod::ClosedForm;
  std::vector<double> v_w1;
  std::vector<double> v_w2;

  bpm::FiberCrossSection fiber;
  bpm::BpmGrid grid;
  double distance_um = 4000.0;
  std::size_t launch_core = 0;
  double absorber_strength = 0.1;
  bool export_fields = false;
  std::vector<double> trench_widths_um{0.0, 1.0, 3.0, 6.0};
  std::vector<double> trench_dns{0.005, 0.01};

  bool needs_seed() const;
  bool is_bpm() const { return command == Command::BpmCrosstalk || command == Command::TrenchStudy; }
  /// Fully resolved parameters (defaults filled in) in the input schema.
  nlohmann::json resolved_parameters() const;
};

struct ParseResult {
  RunConfig config;
  std::vector<Diagnostic> diagnostics;
  bool ok() const;
  /// Throws ConfigError for the first error diagnostic.
  void throw_if_error() const;
};

/// Never throws on bad input; every problem becomes a diagnostic.
ParseResult parse_config(const nlohmann::json& doc);

/// Reads and parses a file; syntax errors become a diagnostic keyed "<file>".
ParseResult load_config(const std::string& path);

}  // namespace mcfqkd::cli
