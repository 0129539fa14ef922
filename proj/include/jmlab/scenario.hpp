#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace jmlab {

// Scenario runner behind the jmlab command-line tool. Configurations are
// flat JSON objects; every scenario kind documents its keys in
// list_scenarios(). Unknown keys are rejected. Outputs (CSV tables, a JSON
// summary, and a plain-text report) are deterministic functions of
// (config, seed) and are written atomically.

struct RunOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> output_dir;
    std::optional<double> tolerance;  // scenario-specific primary tolerance
    int jobs = 1;                     // parallel sweep evaluation
};

// Exit codes of run_scenario / the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

// All schema violations for the given config text (empty means valid).
std::vector<std::string> validate_config_text(const std::string& json_text);

// Runs the scenario; prints progress to `log`. Returns an exit code.
int run_scenario_text(const std::string& json_text, const RunOverrides& overrides,
                      std::ostream& log);

// Human-readable catalogue of scenario kinds and their keys.
std::string list_scenarios();

} // namespace jmlab
