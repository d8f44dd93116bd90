#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "bolab/config.hpp"

namespace bolab {

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,
    kExitConfig = 2,
    kExitSolver = 3,
};

/// Command-line overrides applied on top of the config file.
struct RunOverrides {
    std::optional<std::filesystem::path> out;
    std::optional<std::size_t> threads;
    std::optional<std::uint64_t> seed;
};

const std::vector<std::string>& command_names();
std::string usage();

void apply_overrides(RunConfig& config, const RunOverrides& overrides);

/// Runs one pipeline command and writes its files into config.output_dir.
/// Diagnostics go to `log`. Returns an ExitCode.
int run(const std::string& command, const RunConfig& config, std::ostream& log);

/// Loads the config, applies overrides and dispatches to run().
int run_command(const std::string& command, const std::filesystem::path& config_path, const RunOverrides& overrides,
                std::ostream& log);

}  // namespace bolab
