#include "mock_solvers.hpp"

#include "nupnsat/process.hpp"

#include <atomic>
#include <fstream>
#include <stdexcept>
#include <unistd.h>

namespace fs = std::filesystem;

namespace testing {

namespace {

void write_script(const fs::path& path, const std::string& body)
{
    {
        std::ofstream out(path);
        out << "#!/bin/sh\n" << body;
        if (!out)
            throw std::runtime_error("cannot write " + path.string());
    }
    fs::permissions(path, fs::perms::owner_all, fs::perm_options::add);
}

} // namespace

fs::path cli_path() { return NUPNSAT_CLI; }

fs::path scratch_dir(const std::string& tag)
{
    static std::atomic<int> counter{0};
    auto dir = fs::temp_directory_path()
        / ("nupnsat-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

MockSolvers::MockSolvers() : dir_(scratch_dir("mocks"))
{
    const auto cli = nupnsat::shell_quote(cli_path().string());
    write_script(dir_ / "solve.sh", "out=$(" + cli + " solve --cnf \"$1\") || exit 1\n"
                                    "printf '%s\\n' \"$out\"\n"
                                    "case \"$out\" in\n"
                                    "*\"s SATISFIABLE\"*) exit 10 ;;\n"
                                    "*\"s UNSATISFIABLE\"*) exit 20 ;;\n"
                                    "esac\n"
                                    "exit 0\n");
    write_script(dir_ / "unsat.sh", "exit 20\n");
    write_script(dir_ / "sleep.sh", "sleep 30\n");
    write_script(dir_ / "spin.sh", "while :; do :; done\n");
    write_script(dir_ / "garbage.sh", "echo 'no idea'\nexit 3\n");
    write_script(dir_ / "status_unsat.sh", "echo 's UNSATISFIABLE'\n");
    write_script(dir_ / "contradict.sh", "echo 's SATISFIABLE'\necho 'v 0'\nexit 20\n");
    write_script(dir_ / "all_false.sh", "echo 's SATISFIABLE'\necho 'v 0'\nexit 10\n");
    write_script(dir_ / "truncated.sh", "echo 's SATISFIABLE'\necho 'v 1 2'\nexit 10\n");
    write_script(dir_ / "rank.sh", "units=$(sed -n 's/^c units //p' \"$2\")\n"
                                   "if [ \"$1\" -lt \"$units\" ]; then sleep 30; fi\n"
                                   "exec \"$(dirname \"$0\")/solve.sh\" \"$2\"\n");
}

MockSolvers::~MockSolvers()
{
    std::error_code ec;
    fs::remove_all(dir_, ec);
}

nupnsat::SolverSpec MockSolvers::spec(const std::string& script, double timeout_seconds, const std::string& args,
                                      nupnsat::ClockKind clock) const
{
    nupnsat::SolverSpec s;
    s.name = script.substr(0, script.find('.')) + (args.empty() ? "" : "-" + args);
    s.command = nupnsat::shell_quote((dir_ / script).string()) + (args.empty() ? "" : " " + args) + " {input}";
    s.timeout = nupnsat::Seconds{timeout_seconds};
    s.clock = clock;
    return s;
}

} // namespace testing
