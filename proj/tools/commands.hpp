#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "config.hpp"

namespace uteich::cli {

struct RunContext {
    RunConfig config;
    std::string outDir = ".";
    bool quiet = false;
};

const std::vector<std::string>& command_names();
/// Runs one command, writing its files under ctx.outDir and a JSON summary to `log`.
/// Returns the process exit code: 0 when every check passed, 1 otherwise.
int run_command(const std::string& name, const RunContext& ctx, std::ostream& log);

/// The validate report on its own (exposed for tests).
nlohmann::ordered_json validate_report(const RunConfig& c);

} // namespace uteich::cli
