#include "nupnsat/process.hpp"

#include "nupnsat/error.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <signal.h>
#include <sstream>
#include <sys/resource.h>
#include <sys/time.h>
#include <sys/wait.h>
#include <thread>
#include <unistd.h>
#include <vector>

namespace nupnsat {

namespace {

double to_seconds(const timeval& tv) { return static_cast<double>(tv.tv_sec) + static_cast<double>(tv.tv_usec) * 1e-6; }

/// CPU seconds of the live members of process group `pgid` other than its
/// leader, children they reaped included. These are lost to wait4 when the
/// group is killed before the leader reaps them.
double group_cpu_seconds(pid_t pgid)
{
    double ticks = 0;
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator("/proc", ec)) {
        const auto name = entry.path().filename().string();
        if (name.empty() || name.find_first_not_of("0123456789") != std::string::npos || std::stol(name) == pgid)
            continue;
        std::ifstream in(entry.path() / "stat");
        std::string stat;
        if (!std::getline(in, stat))
            continue;
        // Fields after the parenthesized command name: state ppid pgrp ... utime(14) stime cutime cstime.
        auto close = stat.rfind(')');
        if (close == std::string::npos)
            continue;
        std::istringstream fields(stat.substr(close + 2));
        std::vector<std::string> f{std::istream_iterator<std::string>(fields), {}};
        if (f.size() < 15 || std::stol(f[2]) != pgid)
            continue;
        for (std::size_t i = 11; i <= 14; ++i)
            ticks += std::stod(f[i]);
    }
    return ticks / static_cast<double>(::sysconf(_SC_CLK_TCK));
}

/// File descriptor closed on scope exit.
class Fd {
public:
    explicit Fd(int fd) : fd_(fd) {}
    ~Fd()
    {
        if (fd_ >= 0)
            ::close(fd_);
    }
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;

    int get() const { return fd_; }

private:
    int fd_;
};

std::string errno_text() { return std::strerror(errno); }

} // namespace

std::string shell_quote(std::string_view s)
{
    std::string out = "'";
    for (char c : s) {
        if (c == '\'')
            out += "'\\''";
        else
            out += c;
    }
    out += '\'';
    return out;
}

ProcessResult run_shell(const std::string& command, const ProcessOptions& options)
{
    std::string capture_path;
    int out_fd = -1;
    if (options.stdout_path.empty()) {
        std::string tmpl = (std::filesystem::temp_directory_path() / "nupnsat-out-XXXXXX").string();
        out_fd = ::mkostemp(tmpl.data(), O_CLOEXEC);
        if (out_fd < 0)
            throw Error(Errc::SpawnFailure, "cannot create capture file: " + errno_text());
        capture_path = tmpl;
    } else {
        out_fd = ::open(options.stdout_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
        if (out_fd < 0)
            throw Error(Errc::SpawnFailure, "cannot open " + options.stdout_path.string() + ": " + errno_text());
    }
    Fd out(out_fd);
    std::string in_path = options.stdin_path.empty() ? std::string("/dev/null") : options.stdin_path.string();
    Fd in(::open(in_path.c_str(), O_RDONLY | O_CLOEXEC));
    if (in.get() < 0) {
        if (!capture_path.empty())
            ::unlink(capture_path.c_str());
        throw Error(Errc::SpawnFailure, "cannot open " + in_path + ": " + errno_text());
    }
    Fd null_err(::open("/dev/null", O_WRONLY | O_CLOEXEC));

    const auto start = std::chrono::steady_clock::now();
    pid_t pid = ::fork();
    if (pid < 0) {
        if (!capture_path.empty())
            ::unlink(capture_path.c_str());
        throw Error(Errc::SpawnFailure, "fork failed: " + errno_text());
    }
    if (pid == 0) {
        ::setpgid(0, 0);
        ::dup2(in.get(), STDIN_FILENO);
        ::dup2(out.get(), STDOUT_FILENO);
        ::dup2(null_err.get(), STDERR_FILENO);
        if (options.cpu_limit > 0) {
            rlimit lim{options.cpu_limit, options.cpu_limit + 1};
            ::setrlimit(RLIMIT_CPU, &lim);
        }
        ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
        ::_exit(127);
    }
    ::setpgid(pid, pid);

    ProcessResult result;
    int status = 0;
    rusage usage{};
    auto pause = std::chrono::microseconds(500);
    while (true) {
        // Peek without reaping so the group can be killed before the pid is recycled.
        siginfo_t info{};
        if (::waitid(P_PID, static_cast<id_t>(pid), &info, WEXITED | WNOHANG | WNOWAIT) < 0 && errno != EINTR)
            throw Error(Errc::SpawnFailure, "waitid failed: " + errno_text());
        if (info.si_pid == pid)
            break;
        if (std::chrono::steady_clock::now() - start >= options.timeout) {
            result.timed_out = true;
            break;
        }
        std::this_thread::sleep_for(pause);
        pause = std::min<std::chrono::microseconds>(pause * 2, std::chrono::milliseconds(10));
    }
    const double stragglers_cpu = group_cpu_seconds(pid);
    ::kill(-pid, SIGKILL); // the whole tree on timeout, stragglers otherwise
    while (::wait4(pid, &status, 0, &usage) < 0) {
        if (errno != EINTR)
            throw Error(Errc::SpawnFailure, "wait4 failed: " + errno_text());
    }
    result.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    result.cpu_seconds = to_seconds(usage.ru_utime) + to_seconds(usage.ru_stime) + stragglers_cpu;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : WIFSIGNALED(status) ? -WTERMSIG(status) : -1;

    if (!capture_path.empty()) {
        std::ifstream f(capture_path, std::ios::binary);
        std::ostringstream ss;
        ss << f.rdbuf();
        result.output = ss.str();
        ::unlink(capture_path.c_str());
    }
    return result;
}

void compress_file(const std::filesystem::path& input, const std::string& command, const std::filesystem::path& output)
{
    ProcessOptions opts;
    opts.stdin_path = input;
    opts.stdout_path = output;
    auto r = run_shell(command, opts);
    if (r.timed_out || r.exit_code != 0)
        throw Error(Errc::Io, "compressor \"" + command + "\" failed with status " + std::to_string(r.exit_code));
}

} // namespace nupnsat
