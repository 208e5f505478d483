#include "nupnsat/bench.hpp"

#include "nupnsat/error.hpp"
#include "nupnsat/process.hpp"
#include "text_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <csignal>
#include <cstdio>
#include <exception>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>
#include <unistd.h>

namespace nupnsat {

namespace {

std::string fixed3(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

std::string replace_all(std::string s, std::string_view from, std::string_view to)
{
    for (auto pos = s.find(from); pos != std::string::npos; pos = s.find(from, pos + to.size()))
        s.replace(pos, from.size(), to);
    return s;
}

enum class StatusLine { None, Sat, Unsat, Other };

StatusLine find_status_line(std::string_view output)
{
    StatusLine found = StatusLine::None;
    detail::for_each_line(output, '\0', [&](std::size_t, const std::vector<std::string_view>& tok) {
        if (tok[0] != "s" || found != StatusLine::None)
            return;
        if (tok.size() == 2 && tok[1] == "SATISFIABLE")
            found = StatusLine::Sat;
        else if (tok.size() == 2 && tok[1] == "UNSATISFIABLE")
            found = StatusLine::Unsat;
        else
            found = StatusLine::Other;
    });
    return found;
}

std::uint32_t header_vars(const std::filesystem::path& cnf_path)
{
    std::ifstream in(cnf_path);
    if (!in)
        throw Error(Errc::Io, "cannot read " + cnf_path.string());
    return static_cast<std::uint32_t>(read_dimacs_header(in).num_vars);
}

/// Empty if the model decodes to a proper partition of `rel`.
std::string check_model(const std::string& text, const ConcurrencyRelation& rel, UnitCount n)
{
    try {
        auto nv = static_cast<std::uint32_t>(rel.place_count() * n.value());
        auto ua = decode(parse_model(text, nv), rel.place_count(), n);
        auto violations = verify_partition(ua, rel);
        if (!violations.empty()) {
            const auto& v = violations.front();
            return "model puts concurrent places " + std::to_string(v.first.value) + " and "
                + std::to_string(v.second.value) + " in unit " + std::to_string(v.unit);
        }
        return {};
    } catch (const Error& e) {
        return e.what();
    }
}

} // namespace

std::string_view to_string(Verdict v)
{
    switch (v) {
    case Verdict::Sat: return "SAT";
    case Verdict::Unsat: return "UNSAT";
    case Verdict::Timeout: return "TIMEOUT";
    case Verdict::Error: return "ERROR";
    }
    return "ERROR";
}

std::string_view to_string(FormulaType t)
{
    switch (t) {
    case FormulaType::Sat: return "SAT";
    case FormulaType::Unsat: return "UNSAT";
    case FormulaType::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

void SolverSpec::validate() const
{
    if (name.empty())
        throw Error(Errc::InvalidConfig, "solver without a name");
    if (!(timeout.count() > 0))
        throw Error(Errc::InvalidConfig, "solver " + name + ": timeout must be positive");
    if (command.find(input_placeholder) == std::string::npos)
        throw Error(Errc::InvalidConfig, "solver " + name + ": command lacks " + std::string(input_placeholder));
}

SolverRun run_solver(const SolverSpec& spec, const std::filesystem::path& cnf_path)
{
    spec.validate();
    if (!std::filesystem::is_regular_file(cnf_path))
        throw Error(Errc::Io, "no such formula " + cnf_path.string());

    ProcessOptions opts;
    opts.timeout = spec.timeout;
    if (spec.clock == ClockKind::Cpu)
        opts.cpu_limit = static_cast<unsigned>(std::ceil(spec.timeout.count())) + 1;
    auto r = run_shell(replace_all(spec.command, input_placeholder, shell_quote(cnf_path.string())), opts);
    if (!r.timed_out && (r.exit_code == 126 || r.exit_code == 127))
        throw Error(Errc::SpawnFailure, "solver " + spec.name + " could not be started (status "
                                            + std::to_string(r.exit_code) + ")");

    SolverRun run;
    run.solver = spec.name;
    run.cpu_seconds = r.cpu_seconds;
    run.wall_seconds = r.wall_seconds;
    run.seconds = spec.clock == ClockKind::Cpu ? r.cpu_seconds : r.wall_seconds;

    const bool over_budget = r.timed_out || run.seconds > spec.timeout.count() || r.exit_code == -SIGXCPU;
    if (over_budget) {
        run.verdict = Verdict::Timeout;
        run.seconds = spec.timeout.count();
        return run;
    }

    auto status = find_status_line(r.output);
    Verdict claimed = Verdict::Error;
    if (r.exit_code == 10)
        claimed = Verdict::Sat;
    else if (r.exit_code == 20)
        claimed = Verdict::Unsat;
    else if (status == StatusLine::Sat)
        claimed = Verdict::Sat;
    else if (status == StatusLine::Unsat)
        claimed = Verdict::Unsat;

    if (claimed == Verdict::Error) {
        run.detail = "exit status " + std::to_string(r.exit_code) + " without a verdict";
        return run;
    }
    if ((claimed == Verdict::Sat && status == StatusLine::Unsat) || (claimed == Verdict::Unsat && status == StatusLine::Sat)) {
        run.detail = "exit status contradicts status line";
        return run;
    }
    if (claimed == Verdict::Sat) {
        try {
            parse_model(r.output, header_vars(cnf_path));
        } catch (const Error& e) {
            run.detail = std::string("unparsable model: ") + e.what();
            return run;
        }
        run.model = std::move(r.output);
    }
    run.verdict = claimed;
    return run;
}

std::string Difficulty::label() const
{
    std::string out = std::to_string(failed);
    if (mean_easy_seconds)
        out += " (" + std::to_string(std::llround(*mean_easy_seconds)) + " s)";
    return out;
}

Difficulty difficulty(std::span<const SolverRun> runs)
{
    if (runs.empty())
        throw Error(Errc::InvalidConfig, "difficulty needs at least one run");
    bool sat = false;
    bool unsat = false;
    Difficulty d;
    double total = 0;
    std::size_t solved_count = 0;
    for (const auto& r : runs) {
        sat |= r.verdict == Verdict::Sat;
        unsat |= r.verdict == Verdict::Unsat;
        if (solved(r)) {
            total += r.seconds;
            ++solved_count;
        } else {
            ++d.failed;
        }
    }
    if (sat && unsat)
        throw Error(Errc::InconsistentVerdicts, "both SAT and UNSAT reported");
    if (d.failed <= 1 && solved_count > 0)
        d.mean_easy_seconds = total / static_cast<double>(solved_count);
    return d;
}

Selection select(std::span<const SolverRun> runs, Seconds easy_threshold, Seconds hard_threshold, SelectMode mode)
{
    const SolverRun* fastest = nullptr;
    bool bounded = !runs.empty();
    for (const auto& r : runs) {
        if (solved(r) && (fastest == nullptr || r.seconds < fastest->seconds))
            fastest = &r;
        if (!solved(r) || r.seconds > hard_threshold.count())
            bounded = false;
    }
    const bool quick = fastest != nullptr && fastest->seconds < easy_threshold.count();

    std::vector<std::string> why;
    if (quick)
        why.push_back(fastest->solver + " solved it in " + fixed3(fastest->seconds) + " s");
    if (bounded)
        why.push_back("every solver finished within " + fixed3(hard_threshold.count()) + " s");

    const bool reject = mode == SelectMode::And ? quick && bounded : quick || bounded;
    if (!reject)
        return {};
    std::string reason;
    for (const auto& w : why) {
        if (!reason.empty())
            reason += mode == SelectMode::And ? " and " : "; ";
        reason += w;
    }
    return {false, reason};
}

const SolverSpec& Portfolio::find(std::string_view name) const
{
    for (const auto& s : solvers) {
        if (s.name == name)
            return s;
    }
    throw Error(Errc::InvalidConfig, "no solver named " + std::string(name) + " in portfolio");
}

Portfolio parse_portfolio(std::string_view json_text)
{
    using nlohmann::json;
    Portfolio p;
    try {
        auto doc = json::parse(json_text);
        if (doc.contains("easy_threshold"))
            p.easy_threshold = Seconds{doc.at("easy_threshold").get<double>()};
        if (doc.contains("hard_threshold"))
            p.hard_threshold = Seconds{doc.at("hard_threshold").get<double>()};
        if (doc.contains("mode")) {
            auto mode = doc.at("mode").get<std::string>();
            if (mode == "and")
                p.mode = SelectMode::And;
            else if (mode == "or")
                p.mode = SelectMode::Or;
            else
                throw Error(Errc::InvalidConfig, "mode must be \"and\" or \"or\"");
        }
        std::set<std::string> names;
        for (const auto& s : doc.at("solvers")) {
            SolverSpec spec;
            spec.name = s.at("name").get<std::string>();
            spec.command = s.at("command").get<std::string>();
            spec.timeout = Seconds{s.at("timeout").get<double>()};
            auto clock = s.value("clock", std::string("cpu"));
            if (clock == "cpu")
                spec.clock = ClockKind::Cpu;
            else if (clock == "wall")
                spec.clock = ClockKind::Wall;
            else
                throw Error(Errc::InvalidConfig, "solver " + spec.name + ": clock must be \"cpu\" or \"wall\"");
            spec.validate();
            if (!names.insert(spec.name).second)
                throw Error(Errc::InvalidConfig, "duplicate solver name " + spec.name);
            p.solvers.push_back(std::move(spec));
        }
    } catch (const json::exception& e) {
        throw Error(Errc::InvalidConfig, std::string("portfolio: ") + e.what());
    }
    if (p.solvers.empty())
        throw Error(Errc::InvalidConfig, "portfolio has no solvers");
    if (!(p.easy_threshold.count() > 0) || !(p.hard_threshold.count() > 0))
        throw Error(Errc::InvalidConfig, "thresholds must be positive");
    return p;
}

Portfolio load_portfolio(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_portfolio(ss.str());
}

BenchRecord make_record(std::string id, std::uint64_t num_vars, std::uint64_t num_clauses,
                        std::span<const SolverRun> runs, const Portfolio& portfolio)
{
    BenchRecord rec;
    rec.id = std::move(id);
    rec.num_vars = num_vars;
    rec.num_clauses = num_clauses;
    bool sat = std::any_of(runs.begin(), runs.end(), [](const SolverRun& r) { return r.verdict == Verdict::Sat; });
    bool unsat = std::any_of(runs.begin(), runs.end(), [](const SolverRun& r) { return r.verdict == Verdict::Unsat; });
    try {
        auto d = difficulty(runs);
        rec.difficulty = d.failed;
        rec.mean_easy_seconds = d.mean_easy_seconds;
        rec.type = sat ? FormulaType::Sat : unsat ? FormulaType::Unsat : FormulaType::Unknown;
        rec.selection = select(runs, portfolio.easy_threshold, portfolio.hard_threshold, portfolio.mode);
    } catch (const Error& e) {
        if (e.code() != Errc::InconsistentVerdicts)
            throw;
        rec.difficulty = static_cast<std::uint32_t>(std::count_if(runs.begin(), runs.end(),
                                                                  [](const SolverRun& r) { return !solved(r); }));
        rec.type = FormulaType::Unknown;
        rec.selection = {false, "inconsistent verdicts"};
    }
    return rec;
}

namespace {

std::atomic<std::uint64_t> probe_counter{0};

std::filesystem::path scratch_path(const std::filesystem::path& dir, std::string_view stem)
{
    return dir / (std::string(stem) + "-" + std::to_string(::getpid()) + "-" + std::to_string(probe_counter++) + ".cnf");
}

void write_formula(const UnitEncoding& enc, const std::filesystem::path& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error(Errc::Io, "cannot write " + path.string());
    emit_dimacs(enc, out);
}

} // namespace

SweepPoint probe_units(const ConcurrencyRelation& rel, UnitCount n, const SolverChoice& solver,
                       const ProbeOptions& options)
{
    SweepPoint point;
    point.units = n.value();

    if (const auto* internal = std::get_if<InternalSolver>(&solver)) {
        auto outcome = dpll_solve(encode(rel, n, options.symmetry), internal->budget);
        point.verdict = outcome.status;
        point.seconds = outcome.stats.seconds;
        point.decisions = outcome.stats.decisions;
        if (outcome.status == SolveStatus::Sat
            && !verify_partition(decode(outcome.model, rel.place_count(), n), rel).empty())
            throw std::logic_error("internal solver model decodes to an improper partition");
        return point;
    }

    const auto& spec = std::get<SolverSpec>(solver);
    UnitEncoding enc(rel, n, options.symmetry);
    auto path = scratch_path(options.workdir, "probe-n" + std::to_string(n.value()));
    write_formula(enc, path);
    SolverRun run;
    try {
        run = run_solver(spec, path);
    } catch (...) {
        std::filesystem::remove(path);
        throw;
    }
    std::filesystem::remove(path);

    point.seconds = run.seconds;
    if (run.verdict == Verdict::Unsat)
        point.verdict = SolveStatus::Unsat;
    else if (run.verdict == Verdict::Sat)
        point.verdict = check_model(run.model, rel, n).empty() ? SolveStatus::Sat : SolveStatus::Unknown;
    else
        point.verdict = SolveStatus::Unknown;
    return point;
}

void check_monotone(std::span<const SweepPoint> points)
{
    std::optional<std::uint32_t> first_sat;
    for (const auto& p : points) {
        if (p.verdict == SolveStatus::Sat && !first_sat)
            first_sat = p.units;
        if (p.verdict == SolveStatus::Unsat && first_sat)
            throw Error(Errc::NonMonotoneVerdicts, "UNSAT at n=" + std::to_string(p.units) + " after SAT at n="
                                                       + std::to_string(*first_sat));
    }
}

std::vector<SweepPoint> sweep_units(const ConcurrencyRelation& rel, std::uint32_t first, std::uint32_t last,
                                    const SolverChoice& solver, const ProbeOptions& options)
{
    if (first < 1 || first > last)
        throw Error(Errc::InvalidConfig, "unit range must satisfy 1 <= first <= last");
    std::vector<SweepPoint> points;
    for (std::uint32_t n = first; n <= last; ++n)
        points.push_back(probe_units(rel, UnitCount(n), solver, options));
    check_monotone(points);
    return points;
}

void emit_sweep_csv(std::span<const SweepPoint> points, std::ostream& out, bool timing)
{
    out << "n,verdict,decisions" << (timing ? ",seconds" : "") << '\n';
    for (const auto& p : points) {
        out << p.units << ',' << to_string(p.verdict) << ',';
        if (p.decisions)
            out << *p.decisions;
        if (timing) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%.6f", p.seconds);
            out << ',' << buf;
        }
        out << '\n';
    }
}

std::uint32_t minimal_units(const ConcurrencyRelation& rel, const SolverChoice& solver, std::uint32_t upper_hint,
                            const ProbeOptions& options)
{
    std::uint32_t lo = 1;
    std::uint32_t hi = std::max<std::uint32_t>(upper_hint, 1);
    while (lo < hi) {
        auto mid = lo + (hi - lo) / 2;
        auto point = probe_units(rel, UnitCount(mid), solver, options);
        if (point.verdict == SolveStatus::Unknown)
            throw Error(Errc::SolverUnknown, "no verdict at n=" + std::to_string(mid));
        if (point.verdict == SolveStatus::Sat)
            hi = mid;
        else
            lo = mid + 1;
    }
    return lo;
}

BenchResult run_bench(std::span<const BenchTask> tasks, const Portfolio& portfolio, const BenchOptions& options)
{
    if (portfolio.solvers.empty())
        throw Error(Errc::InvalidConfig, "portfolio has no solvers");
    std::set<std::string> ids;
    for (const auto& t : tasks) {
        if (!detail::is_valid_name(t.id))
            throw Error(Errc::InvalidConfig, "invalid formula id \"" + t.id + "\"");
        if (!ids.insert(t.id).second)
            throw Error(Errc::InvalidConfig, "duplicate formula id " + t.id);
    }
    std::filesystem::create_directories(options.out_dir);

    std::vector<BenchRecord> records(tasks.size());
    std::vector<std::vector<SolverRun>> runs(tasks.size());
    std::vector<std::exception_ptr> errors(tasks.size());

    auto work = [&](std::size_t i) {
        const auto& task = tasks[i];
        UnitEncoding enc(*task.relation, task.units, task.symmetry);
        auto path = options.out_dir / (task.id + ".cnf");
        write_formula(enc, path);
        if (options.compress_command) {
            auto packed = path;
            packed += ".bz2";
            compress_file(path, *options.compress_command, packed);
        }
        for (const auto& spec : portfolio.solvers) {
            auto run = run_solver(spec, path);
            if (run.verdict == Verdict::Sat) {
                if (auto problem = check_model(run.model, *task.relation, task.units); !problem.empty()) {
                    run.verdict = Verdict::Error;
                    run.detail = "rejected model: " + problem;
                }
            }
            runs[i].push_back(std::move(run));
        }
        records[i] = make_record(task.id, enc.num_vars(), enc.num_clauses(), runs[i], portfolio);
    };

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            try {
                work(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };
    {
        const unsigned width = std::clamp<unsigned>(options.jobs, 1, static_cast<unsigned>(std::max<std::size_t>(tasks.size(), 1)));
        std::vector<std::jthread> pool;
        for (unsigned w = 1; w < width; ++w)
            pool.emplace_back(worker);
        worker();
    }
    for (auto& e : errors) {
        if (e)
            std::rethrow_exception(e);
    }

    std::vector<std::size_t> order(tasks.size());
    for (std::size_t i = 0; i < order.size(); ++i)
        order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return tasks[a].id < tasks[b].id; });

    BenchResult result;
    for (auto i : order) {
        result.records.push_back(std::move(records[i]));
        for (auto& r : runs[i])
            result.runs.emplace_back(tasks[i].id, std::move(r));
    }
    return result;
}

namespace {

std::string csv_field(std::string_view s)
{
    if (s.find_first_of(",\"\n\r") == std::string_view::npos)
        return std::string(s);
    std::string out = "\"";
    for (char c : s) {
        if (c == '"')
            out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv(std::string_view line, std::size_t line_no)
{
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else {
            fields.back() += c;
        }
    }
    if (quoted)
        throw Error(Errc::Syntax, "unterminated quote", line_no);
    return fields;
}

constexpr std::string_view records_header = "id,variables,clauses,type,difficulty,label,mean_easy_seconds,selection,reason";

} // namespace

void emit_records_csv(std::span<const BenchRecord> records, std::ostream& out)
{
    out << records_header << '\n';
    for (const auto& r : records) {
        Difficulty d{r.difficulty, r.mean_easy_seconds};
        out << csv_field(r.id) << ',' << r.num_vars << ',' << r.num_clauses << ',' << to_string(r.type) << ','
            << r.difficulty << ',' << csv_field(d.label()) << ','
            << (r.mean_easy_seconds ? fixed3(*r.mean_easy_seconds) : std::string()) << ','
            << (r.selection.keep ? "keep" : "reject") << ',' << csv_field(r.selection.reason) << '\n';
    }
}

std::vector<BenchRecord> parse_records_csv(std::string_view text)
{
    std::vector<BenchRecord> out;
    std::size_t line_no = 0;
    bool header = true;
    while (!text.empty()) {
        ++line_no;
        auto eol = text.find('\n');
        auto line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            continue;
        if (header) {
            if (line != records_header)
                throw Error(Errc::Syntax, "expected header " + std::string(records_header), line_no);
            header = false;
            continue;
        }
        auto f = split_csv(line, line_no);
        if (f.size() != 9)
            throw Error(Errc::Syntax, "expected 9 fields, got " + std::to_string(f.size()), line_no);
        BenchRecord r;
        r.id = f[0];
        if (!detail::parse_int(f[1], r.num_vars) || !detail::parse_int(f[2], r.num_clauses)
            || !detail::parse_int(f[4], r.difficulty))
            throw Error(Errc::Syntax, "bad number", line_no);
        if (f[3] == "SAT")
            r.type = FormulaType::Sat;
        else if (f[3] == "UNSAT")
            r.type = FormulaType::Unsat;
        else if (f[3] == "UNKNOWN")
            r.type = FormulaType::Unknown;
        else
            throw Error(Errc::Syntax, "bad type " + f[3], line_no);
        if (!f[6].empty()) {
            try {
                r.mean_easy_seconds = std::stod(f[6]);
            } catch (const std::exception&) {
                throw Error(Errc::Syntax, "bad mean " + f[6], line_no);
            }
        }
        if (f[7] == "keep")
            r.selection = {};
        else if (f[7] == "reject")
            r.selection = {false, f[8]};
        else
            throw Error(Errc::Syntax, "bad selection " + f[7], line_no);
        out.push_back(std::move(r));
    }
    if (header)
        throw Error(Errc::Syntax, "missing header");
    return out;
}

void emit_runs_csv(std::span<const std::pair<std::string, SolverRun>> runs, std::ostream& out)
{
    out << "id,solver,verdict,seconds,cpu_seconds,wall_seconds,detail\n";
    for (const auto& [id, r] : runs) {
        out << csv_field(id) << ',' << csv_field(r.solver) << ',' << to_string(r.verdict) << ',' << fixed3(r.seconds)
            << ',' << fixed3(r.cpu_seconds) << ',' << fixed3(r.wall_seconds) << ',' << csv_field(r.detail) << '\n';
    }
}

void dispersion_report(std::span<const BenchRecord> records, std::ostream& out, ReportFilter filter)
{
    auto pass = [&](const BenchRecord& r) {
        switch (filter) {
        case ReportFilter::All: return true;
        case ReportFilter::Kept: return r.selection.keep;
        case ReportFilter::Sat: return r.type == FormulaType::Sat;
        case ReportFilter::Unsat: return r.type == FormulaType::Unsat;
        }
        return false;
    };
    if (std::none_of(records.begin(), records.end(), pass))
        throw Error(Errc::EmptyReport, "no records to report");
    out << "variables,clauses,type,difficulty\n";
    for (const auto& r : records) {
        if (pass(r))
            out << r.num_vars << ',' << r.num_clauses << ',' << to_string(r.type) << ',' << r.difficulty << '\n';
    }
    if (!out)
        throw Error(Errc::Io, "write failed");
}

} // namespace nupnsat
