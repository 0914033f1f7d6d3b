#pragma once

#include <string>
#include <vector>

#include "artifacts.hpp"
#include "ldem/remesh.hpp"
#include "run_config.hpp"

namespace ldem::cli {

struct CommandOutput {
    std::vector<SummaryRow> rows;
    std::vector<std::string> files;  // written artifacts, in order
};

// "builtin:hemisphere", "builtin:peaks" or an OBJ path.
SurfaceMesh load_surface(const std::string& input);
// The remesh pipeline behind cmd_remesh, without writing artifacts.
RemeshResult run_remesh(const RunConfig& config);

CommandOutput cmd_map2d(const RunConfig& config);
CommandOutput cmd_map3d(const RunConfig& config);
CommandOutput cmd_baseline(const RunConfig& config);
CommandOutput cmd_compare(const RunConfig& config);
CommandOutput cmd_remesh(const RunConfig& config);
CommandOutput cmd_metrics(const RunConfig& config);

CommandOutput run_command(const RunConfig& config);

// Entry point behind the `ldem` binary. Exit codes: 0 success, 1 pipeline or
// input error, 2 configuration rejected by the schema, CLI11 codes for bad flags.
int run_cli(int argc, char** argv);

}  // namespace ldem::cli
