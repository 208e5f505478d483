#pragma once

#include <chrono>
#include <filesystem>
#include <string>
#include <string_view>

namespace nupnsat {

struct ProcessResult {
    int exit_code = 0;      // negative signal number if killed by a signal
    bool timed_out = false; // killed at the wall-clock deadline
    double cpu_seconds = 0; // user + system time of the process tree, killed members included
    double wall_seconds = 0;
    std::string output; // captured standard output
};

struct ProcessOptions {
    std::chrono::duration<double> timeout{3600.0};
    /// Hard CPU limit in seconds (RLIMIT_CPU) for the child, 0 for none.
    unsigned cpu_limit = 0;
    /// Redirect standard input from this file, /dev/null when empty.
    std::filesystem::path stdin_path;
    /// Write standard output here instead of capturing it.
    std::filesystem::path stdout_path;
};

/// Runs `/bin/sh -c command` in its own process group and kills the group at
/// the deadline. Throws Error(SpawnFailure) if the process cannot be started.
ProcessResult run_shell(const std::string& command, const ProcessOptions& options);

/// Single-quotes `s` for /bin/sh.
std::string shell_quote(std::string_view s);

/// Pipes `input` through `command` (e.g. "bzip2 -c") into `output`.
/// Throws Error(Io) on a nonzero exit status.
void compress_file(const std::filesystem::path& input, const std::string& command,
                   const std::filesystem::path& output);

} // namespace nupnsat
