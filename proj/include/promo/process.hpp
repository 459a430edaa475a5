#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace promo::proc {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

struct RunOptions {
    std::filesystem::path cwd;                       // empty = inherit
    std::map<std::string, std::string> extra_env;    // appended to the environment
    int timeout_seconds = 120;
};

// Runs an executable with an argv vector (no shell involved) and captures
// stdout/stderr. Throws promo::RepositoryAccessFailed if the process cannot
// be spawned or times out.
RunResult run(const std::vector<std::string>& argv, const RunOptions& options = {});

// Test hook observing the argv of every spawned process.
using TraceHook = std::function<void(const std::vector<std::string>&)>;
TraceHook set_trace_hook(TraceHook hook);

} // namespace promo::proc
