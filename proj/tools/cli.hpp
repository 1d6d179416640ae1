#pragma once

#include <ostream>
#include <string_view>
#include <vector>

namespace modelock::cli {

enum ExitCode : int { exit_ok = 0, exit_failure = 1, exit_config = 2, exit_numerical = 3, exit_check = 4 };

struct PresetStep {
    std::string_view name;    ///< subdirectory for multi-step presets, empty for single-step ones
    std::string_view config;  ///< key = value text
};

struct Preset {
    std::string_view name;
    std::string_view description;
    std::vector<PresetStep> steps;
};

const std::vector<Preset>& presets();
const Preset* find_preset(std::string_view name);

/// Command-line entry point; returns the process exit code.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace modelock::cli
