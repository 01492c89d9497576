#pragma once

#include <string>
#include <vector>

#include "cli/config.hpp"

namespace alphamod::cli {

enum ExitCode : int {
    exit_ok = 0,
    exit_threshold = 1,  // a quantitative check failed; reports are still written
    exit_config = 2,     // invalid configuration or unreadable input
    exit_numerical = 3,
};

// Each command writes its reports into cfg.out and returns an ExitCode.
int cmd_admissible(const RunConfig& cfg);
int cmd_frame_info(const RunConfig& cfg);
int cmd_analyze(const RunConfig& cfg);
int cmd_synthesize(const RunConfig& cfg);
int cmd_roundtrip(const RunConfig& cfg);
int cmd_diagnostics(const RunConfig& cfg);
int cmd_coorbit_norm(const RunConfig& cfg);
int cmd_covering_dump(const RunConfig& cfg);

// Parses argv (program name first), merges the JSON config and flags, validates and dispatches.
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace alphamod::cli
