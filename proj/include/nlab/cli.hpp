#pragma once
// Config-driven runner behind the nonlocal_lab binary.
//
// A config is one JSON object:
//   {"command": "...", "grid": {"dim": 1, "n": 64}, "p": 2, "seed": 0,
//    "output_dir": "out", ...command-specific keys}
// Every command produces a ConvergenceReport (single-value commands have no
// rows and put their results in `scalars`), written as <stem>.json and
// <stem>.csv in output_dir, where stem defaults to the command name.

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "nlab/report.hpp"

namespace nlab::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitAssertionFailure = 2;

// Carries one message per problem, each prefixed with a JSON pointer.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> errors);
  const std::vector<std::string>& errors() const noexcept { return errors_; }

 private:
  std::vector<std::string> errors_;
};

std::vector<std::string> command_names();

// Schema check only; an empty result means the config is structurally valid.
std::vector<std::string> validate_config(const nlohmann::json& config);

// Validates, then runs the command. Throws ConfigError on schema problems and
// on argument errors raised while building the inputs.
ConvergenceReport execute(const nlohmann::json& config);

// Reads, runs and writes reports. Nothing is written unless the command
// completes; returns one of the exit codes above.
int run(const std::filesystem::path& config_path, std::ostream& out, std::ostream& err);

// Sorted two-column table of fixture and family ids.
std::string fixtures_table();

}  // namespace nlab::cli
