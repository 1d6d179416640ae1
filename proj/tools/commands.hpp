#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace modelock::cli {

struct CheckLine {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct RunReport {
    std::vector<std::string> outputs;  ///< file names written into the output directory
    std::vector<CheckLine> checks;
    std::vector<std::string> warnings;
    double seconds = 0.0;

    bool all_pass() const;
};

/// Executes the configured command, writes its datasets, plots and
/// manifest.txt into `out_dir`, and prints check lines and warnings to `log`.
/// Library errors propagate unchanged.
RunReport run(const Settings& settings, const std::filesystem::path& out_dir, std::ostream& log);

/// manifest.txt content: metadata as '#' comment lines followed by the
/// resolved configuration, so the file is itself a valid config.
std::string manifest_text(const Settings& settings, const RunReport& report);

}  // namespace modelock::cli
