// nupnsat: command-line front end.
//
//   explore    reachable markings of a .snet/.snupn net
//   relation   concurrency relation (.crel) of a net
//   encode     DIMACS formula "places fit in n units"
//   solve      internal DPLL on a DIMACS file
//   decode     solver model -> unit assignment (.units)
//   verify     check a unit assignment against a relation
//   chromatic  minimal number of units
//   sweep      verdicts over a range of unit counts
//   bench      run a solver portfolio and score formulas
//   report     dispersion CSV from bench records
//
// Exit status: 0 success, 1 domain error, 2 usage error.

#include "nupnsat/bench.hpp"
#include "nupnsat/cnf.hpp"
#include "nupnsat/encode.hpp"
#include "nupnsat/error.hpp"
#include "nupnsat/net.hpp"
#include "nupnsat/process.hpp"
#include "nupnsat/reachability.hpp"
#include "nupnsat/solver.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

namespace fs = std::filesystem;
using namespace nupnsat;

namespace {

constexpr const char* portfolio_env = "NUPNSAT_PORTFOLIO";

const CLI::Range unit_range(1u, 1u << 30);

std::string read_file(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

/// Re-throws parser errors with the file name in front.
template <class Fn>
auto with_file(const fs::path& path, Fn&& fn)
{
    try {
        return fn(read_file(path));
    } catch (const UnsafeNetError&) {
        throw;
    } catch (const Error& e) {
        std::string where = path.string();
        if (e.line() != 0)
            where += ":" + std::to_string(e.line());
        throw Error(e.code(), where + ": " + e.message());
    }
}

/// Output file or standard output.
class Sink {
public:
    explicit Sink(const std::string& path)
    {
        if (!path.empty() && path != "-") {
            file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
            if (!*file_)
                throw Error(Errc::Io, "cannot write " + path);
        }
    }

    std::ostream& stream() { return file_ ? *file_ : std::cout; }

    void close()
    {
        stream().flush();
        if (!stream())
            throw Error(Errc::Io, "write failed");
    }

private:
    std::unique_ptr<std::ofstream> file_;
};

bool is_nupn_path(const fs::path& p) { return p.extension() == ".snupn"; }

PetriNet load_net(const fs::path& path)
{
    return with_file(path, [&](const std::string& text) {
        return is_nupn_path(path) ? parse_nupn(text).net : parse_net(text);
    });
}

struct RelationSource {
    std::string relation_path;
    std::string net_path;
    std::size_t max_markings = ExploreLimits{}.max_markings;
    double max_seconds = ExploreLimits{}.max_seconds.count();

    void add_to(CLI::App* app)
    {
        auto* rel = app->add_option("--relation", relation_path, "Concurrency relation (.crel)")->check(CLI::ExistingFile);
        auto* net = app->add_option("--net", net_path, "Net (.snet/.snupn); the relation is computed by exploration")
                        ->check(CLI::ExistingFile);
        rel->excludes(net);
        app->add_option("--max-markings", max_markings, "Exploration limit on markings")->check(CLI::PositiveNumber);
        app->add_option("--max-seconds", max_seconds, "Exploration time limit")->check(CLI::PositiveNumber);
    }

    ConcurrencyRelation load() const
    {
        if (!relation_path.empty())
            return with_file(relation_path, [](const std::string& text) { return parse_relation(text); });
        if (net_path.empty())
            throw CLI::RequiredError("--relation or --net");
        auto net = load_net(net_path);
        auto markings = explore(net, limits());
        return concurrency_relation(markings, net.place_count());
    }

    ExploreLimits limits() const { return ExploreLimits{max_markings, std::chrono::duration<double>(max_seconds)}; }
};

struct BudgetOptions {
    std::uint64_t max_decisions = Budget{}.max_decisions;
    double max_seconds = Budget{}.max_seconds.count();

    void add_to(CLI::App* app)
    {
        app->add_option("--max-decisions", max_decisions, "DPLL decision budget")->check(CLI::PositiveNumber);
        app->add_option("--solve-seconds", max_seconds, "DPLL time budget")->check(CLI::PositiveNumber);
    }

    Budget get() const { return Budget{max_decisions, std::chrono::duration<double>(max_seconds)}; }
};

struct UnitRange {
    std::uint32_t first = 1;
    std::uint32_t last = 1;
};

UnitRange parse_range(const std::string& text)
{
    UnitRange r;
    auto dots = text.find("..");
    try {
        std::size_t used = 0;
        if (dots == std::string::npos) {
            r.first = r.last = static_cast<std::uint32_t>(std::stoul(text, &used));
            if (used != text.size())
                throw std::invalid_argument(text);
        } else {
            auto lo = text.substr(0, dots);
            auto hi = text.substr(dots + 2);
            r.first = static_cast<std::uint32_t>(std::stoul(lo, &used));
            if (used != lo.size())
                throw std::invalid_argument(text);
            r.last = static_cast<std::uint32_t>(std::stoul(hi, &used));
            if (used != hi.size())
                throw std::invalid_argument(text);
        }
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--units", "expected <n> or <first>..<last>, got " + text);
    }
    if (r.first < 1 || r.first > r.last)
        throw CLI::ValidationError("--units", "need 1 <= first <= last");
    return r;
}

std::string default_portfolio()
{
    const char* env = std::getenv(portfolio_env);
    return env ? env : "";
}

SolverChoice solver_choice(const std::string& name, const std::string& portfolio_path, const Budget& budget)
{
    if (name == "internal")
        return InternalSolver{budget};
    if (portfolio_path.empty())
        throw CLI::ValidationError("--portfolio", std::string("needed for external solvers (or set ") + portfolio_env + ")");
    return load_portfolio(portfolio_path).find(name);
}

ReportFilter parse_filter(const std::string& s)
{
    if (s == "all")
        return ReportFilter::All;
    if (s == "kept")
        return ReportFilter::Kept;
    if (s == "sat")
        return ReportFilter::Sat;
    return ReportFilter::Unsat;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Unit-partition SAT formulas for safe Petri nets"};
    app.require_subcommand(1);
    std::function<int()> action;

    // explore
    std::string net_path;
    std::string out_path;
    RelationSource source;
    BudgetOptions budget;
    auto* explore_cmd = app.add_subcommand("explore", "List reachable markings");
    explore_cmd->add_option("--net", net_path, "Net (.snet or .snupn)")->required()->check(CLI::ExistingFile);
    explore_cmd->add_option("--max-markings", source.max_markings)->check(CLI::PositiveNumber);
    explore_cmd->add_option("--max-seconds", source.max_seconds)->check(CLI::PositiveNumber);
    explore_cmd->add_option("--out", out_path, "Output file (default: stdout)");
    explore_cmd->callback([&] {
        action = [&] {
            std::optional<Nupn> nupn;
            PetriNet net;
            if (is_nupn_path(net_path)) {
                nupn = with_file(net_path, [](const std::string& t) { return parse_nupn(t); });
                net = nupn->net;
            } else {
                net = load_net(net_path);
            }
            for (const auto& d : validate(net)) {
                std::cerr << "nupnsat: " << (d.severity == Severity::Error ? "error: " : "warning: ")
                          << to_string(d.kind) << (d.subject.empty() ? "" : " " + d.subject) << '\n';
            }
            auto markings = explore(net, source.limits());
            Sink sink(out_path);
            auto& os = sink.stream();
            os << "markings " << markings.size() << '\n';
            for (const auto& m : markings) {
                auto places = m.places();
                if (places.empty())
                    os << '-';
                for (std::size_t i = 0; i < places.size(); ++i)
                    os << (i ? " " : "") << net.places[places[i].offset()];
                os << '\n';
            }
            sink.close();
            if (nupn) {
                auto violations = check_unit_safety(*nupn, markings);
                for (const auto& v : violations) {
                    std::cerr << "nupnsat: unit " << nupn->units[v.unit].name << " holds " << v.marked.size()
                              << " tokens in marking " << v.marking + 1 << '\n';
                }
                if (!violations.empty())
                    return 1;
            }
            return 0;
        };
    });

    // relation
    auto* relation_cmd = app.add_subcommand("relation", "Compute the concurrency relation of a net");
    relation_cmd->add_option("--net", source.net_path, "Net (.snet or .snupn)")->required()->check(CLI::ExistingFile);
    relation_cmd->add_option("--max-markings", source.max_markings)->check(CLI::PositiveNumber);
    relation_cmd->add_option("--max-seconds", source.max_seconds)->check(CLI::PositiveNumber);
    relation_cmd->add_option("--out", out_path, "Output file (default: stdout)");
    relation_cmd->callback([&] {
        action = [&] {
            auto rel = source.load();
            Sink sink(out_path);
            emit_relation(rel, sink.stream());
            sink.close();
            return 0;
        };
    });

    // encode
    std::uint32_t units = 1;
    bool no_symmetry = false;
    std::string compress_cmd;
    auto* encode_cmd = app.add_subcommand("encode", "Write the unit-partition formula in DIMACS CNF");
    source.add_to(encode_cmd);
    encode_cmd->add_option("--units", units, "Number of units n")->required()->check(unit_range);
    encode_cmd->add_flag("--no-symmetry", no_symmetry, "Loose membership clauses over all n units");
    encode_cmd->add_option("--out", out_path, "Output .cnf file")->required();
    encode_cmd->add_option("--compress", compress_cmd, "Also write <out>.bz2 through this command, e.g. \"bzip2 -c\"");
    encode_cmd->callback([&] {
        action = [&] {
            auto rel = source.load();
            UnitEncoding enc(rel, UnitCount(units), !no_symmetry);
            {
                Sink sink(out_path);
                emit_dimacs(enc, sink.stream());
                sink.close();
            }
            if (!compress_cmd.empty())
                compress_file(out_path, compress_cmd, out_path + ".bz2");
            return 0;
        };
    });

    // solve
    std::string cnf_path;
    auto* solve_cmd = app.add_subcommand("solve", "Run the internal DPLL solver");
    solve_cmd->add_option("--cnf", cnf_path, "DIMACS file")->required()->check(CLI::ExistingFile);
    budget.add_to(solve_cmd);
    solve_cmd->add_option("--out", out_path, "Output file (default: stdout)");
    solve_cmd->callback([&] {
        action = [&] {
            auto f = with_file(cnf_path, [](const std::string& t) { return parse_dimacs(t); });
            auto outcome = dpll_solve(f, budget.get());
            Sink sink(out_path);
            auto& os = sink.stream();
            os << "c decisions " << outcome.stats.decisions << '\n';
            os << "c propagations " << outcome.stats.propagations << '\n';
            switch (outcome.status) {
            case SolveStatus::Sat: emit_model(outcome.model, os); break;
            case SolveStatus::Unsat: os << "s UNSATISFIABLE\n"; break;
            case SolveStatus::Unknown: os << "c " << outcome.reason << "\ns UNKNOWN\n"; break;
            }
            sink.close();
            return 0;
        };
    });

    // decode
    std::string model_path;
    auto* decode_cmd = app.add_subcommand("decode", "Turn a solver model into a unit assignment");
    decode_cmd->add_option("--model", model_path, "Solver output (s/v lines)")->required()->check(CLI::ExistingFile);
    source.add_to(decode_cmd);
    decode_cmd->add_option("--units", units, "Number of units n")->required()->check(unit_range);
    decode_cmd->add_option("--out", out_path, "Output .units file (default: stdout)");
    decode_cmd->callback([&] {
        action = [&] {
            auto rel = source.load();
            UnitCount n(units);
            auto nv = static_cast<std::uint32_t>(UnitEncoding(rel, n).num_vars());
            auto model = with_file(model_path, [&](const std::string& t) { return parse_model(t, nv); });
            auto ua = decode(model, rel.place_count(), n);
            Sink sink(out_path);
            emit_units(ua, sink.stream());
            sink.close();
            return 0;
        };
    });

    // verify
    std::string assignment_path;
    auto* verify_cmd = app.add_subcommand("verify", "Check that no unit holds two concurrent places");
    verify_cmd->add_option("--assignment", assignment_path, "Unit assignment (.units)")->required()->check(CLI::ExistingFile);
    source.add_to(verify_cmd);
    verify_cmd->callback([&] {
        action = [&] {
            auto rel = source.load();
            auto ua = with_file(assignment_path, [](const std::string& t) { return parse_units(t); });
            auto violations = verify_partition(ua, rel);
            for (const auto& v : violations)
                std::cout << "violation " << v.first.value << ' ' << v.second.value << ' ' << v.unit << '\n';
            if (violations.empty())
                std::cout << "ok\n";
            return violations.empty() ? 0 : 1;
        };
    });

    // chromatic
    std::string method = "sat";
    std::string solver_name = "internal";
    std::string portfolio_path = default_portfolio();
    auto* chromatic_cmd = app.add_subcommand("chromatic", "Smallest number of units admitting a partition");
    source.add_to(chromatic_cmd);
    chromatic_cmd->add_option("--method", method, "sat (binary search with a solver), brute or greedy")
        ->check(CLI::IsMember({"sat", "brute", "greedy"}));
    chromatic_cmd->add_option("--solver", solver_name, "internal or a portfolio solver name (sat method)");
    chromatic_cmd->add_option("--portfolio", portfolio_path, std::string("Portfolio JSON (default: $") + portfolio_env + ")");
    budget.add_to(chromatic_cmd);
    chromatic_cmd->callback([&] {
        action = [&] {
            auto rel = source.load();
            std::uint32_t k = 0;
            if (method == "brute") {
                k = brute_force_chromatic(rel);
            } else if (method == "greedy") {
                k = greedy_coloring(rel).colors;
            } else {
                auto hint = greedy_coloring(rel).colors;
                k = minimal_units(rel, solver_choice(solver_name, portfolio_path, budget.get()), hint);
            }
            std::cout << k << '\n';
            return 0;
        };
    });

    // sweep
    std::string range_text;
    bool timing = false;
    std::string workdir;
    auto* sweep_cmd = app.add_subcommand("sweep", "Solve for each unit count in a range");
    source.add_to(sweep_cmd);
    sweep_cmd->add_option("--units", range_text, "<first>..<last> or <n>")->required();
    sweep_cmd->add_option("--solver", solver_name, "internal or a portfolio solver name");
    sweep_cmd->add_option("--portfolio", portfolio_path, std::string("Portfolio JSON (default: $") + portfolio_env + ")");
    sweep_cmd->add_flag("--no-symmetry", no_symmetry, "Loose membership clauses");
    sweep_cmd->add_flag("--timing", timing, "Add a seconds column (output is then not reproducible)");
    sweep_cmd->add_option("--workdir", workdir, "Scratch directory for external solvers");
    sweep_cmd->add_option("--out", out_path, "Output CSV (default: stdout)");
    budget.add_to(sweep_cmd);
    sweep_cmd->callback([&] {
        action = [&] {
            auto range = parse_range(range_text);
            auto rel = source.load();
            ProbeOptions opts;
            opts.symmetry = !no_symmetry;
            if (!workdir.empty())
                opts.workdir = workdir;
            auto points = sweep_units(rel, range.first, range.last,
                                      solver_choice(solver_name, portfolio_path, budget.get()), opts);
            Sink sink(out_path);
            emit_sweep_csv(points, sink.stream(), timing);
            sink.close();
            return 0;
        };
    });

    // bench
    std::vector<std::string> relation_paths;
    std::string out_dir;
    unsigned jobs = 1;
    auto* bench_cmd = app.add_subcommand("bench", "Run a solver portfolio on generated formulas");
    bench_cmd->add_option("--relation", relation_paths, "Relations (.crel); formula ids are <stem>_n<n>")
        ->required()
        ->check(CLI::ExistingFile);
    bench_cmd->add_option("--units", range_text, "<first>..<last> or <n>")->required();
    bench_cmd->add_option("--portfolio", portfolio_path, std::string("Portfolio JSON (default: $") + portfolio_env + ")");
    bench_cmd->add_option("--out-dir", out_dir, "Directory for formulas, records.csv and runs.csv")->required();
    bench_cmd->add_option("--jobs", jobs, "Formulas processed in parallel")->check(CLI::PositiveNumber);
    bench_cmd->add_option("--compress", compress_cmd, "Also write <id>.cnf.bz2 through this command");
    bench_cmd->add_flag("--no-symmetry", no_symmetry, "Loose membership clauses");
    bench_cmd->callback([&] {
        action = [&] {
            auto range = parse_range(range_text);
            if (portfolio_path.empty())
                throw CLI::ValidationError("--portfolio", std::string("required (or set ") + portfolio_env + ")");
            auto portfolio = load_portfolio(portfolio_path);
            std::vector<ConcurrencyRelation> relations;
            relations.reserve(relation_paths.size());
            for (const auto& p : relation_paths)
                relations.push_back(with_file(p, [](const std::string& t) { return parse_relation(t); }));
            std::vector<BenchTask> tasks;
            for (std::size_t i = 0; i < relations.size(); ++i) {
                auto stem = fs::path(relation_paths[i]).stem().string();
                for (auto n = range.first; n <= range.last; ++n)
                    tasks.push_back({stem + "_n" + std::to_string(n), &relations[i], UnitCount(n), !no_symmetry});
            }
            BenchOptions opts;
            opts.out_dir = out_dir;
            opts.jobs = jobs;
            if (!compress_cmd.empty())
                opts.compress_command = compress_cmd;
            auto result = run_bench(tasks, portfolio, opts);
            {
                Sink records(out_dir + "/records.csv");
                emit_records_csv(result.records, records.stream());
                records.close();
                Sink runs(out_dir + "/runs.csv");
                emit_runs_csv(result.runs, runs.stream());
                runs.close();
            }
            emit_records_csv(result.records, std::cout);
            return 0;
        };
    });

    // report
    std::string records_path;
    std::string filter = "all";
    auto* report_cmd = app.add_subcommand("report", "Dispersion CSV (variables, clauses, type, difficulty)");
    report_cmd->add_option("--records", records_path, "records.csv from bench")->required()->check(CLI::ExistingFile);
    report_cmd->add_option("--filter", filter, "all, kept, sat or unsat")->check(CLI::IsMember({"all", "kept", "sat", "unsat"}));
    report_cmd->add_option("--out", out_path, "Output CSV (default: stdout)");
    report_cmd->callback([&] {
        action = [&] {
            auto records = with_file(records_path, [](const std::string& t) { return parse_records_csv(t); });
            std::ostringstream buffer;
            dispersion_report(records, buffer, parse_filter(filter));
            Sink sink(out_path);
            sink.stream() << buffer.str();
            sink.close();
            return 0;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        return action();
    } catch (const CLI::Error& e) {
        std::cerr << "nupnsat: " << e.what() << '\n';
        return 2;
    } catch (const UnsafeNetError& e) {
        std::cerr << "nupnsat: " << e.what() << "\nnupnsat: trace:";
        for (auto t : e.trace())
            std::cerr << ' ' << t.value;
        std::cerr << '\n';
        return 1;
    } catch (const Error& e) {
        std::cerr << "nupnsat: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "nupnsat: internal error: " << e.what() << '\n';
        return 1;
    }
}
