#pragma once

#include "nupnsat/encode.hpp"
#include "nupnsat/reachability.hpp"
#include "nupnsat/solver.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace nupnsat {

using Seconds = std::chrono::duration<double>;

inline constexpr std::string_view input_placeholder = "{input}";

/// Which measurement a solver is charged with.
enum class ClockKind { Cpu, Wall };

/// External solver. `command` is run through /bin/sh with `{input}` replaced
/// by the quoted formula path. Exit code 10 means satisfiable, 20
/// unsatisfiable, anything else unknown.
struct SolverSpec {
    std::string name;
    std::string command;
    Seconds timeout{7200.0};
    ClockKind clock = ClockKind::Cpu;

    /// Throws Error(InvalidConfig) on an empty name, a nonpositive timeout or
    /// a command without the input placeholder.
    void validate() const;
};

enum class Verdict { Sat, Unsat, Timeout, Error };

std::string_view to_string(Verdict v);

struct SolverRun {
    std::string solver;
    Verdict verdict = Verdict::Error;
    /// Time charged to the run: the solver's clock, or the timeout for Timeout.
    double seconds = 0;
    double cpu_seconds = 0;
    double wall_seconds = 0;
    std::string model;  // solver output when Sat
    std::string detail; // why the run is Error
};

inline bool solved(const SolverRun& r) { return r.verdict == Verdict::Sat || r.verdict == Verdict::Unsat; }

/// Runs one solver on one DIMACS file. A Sat exit must come with a parseable
/// model for the file's variable count, otherwise the run is Error. Throws
/// Error(SpawnFailure) when the command cannot be started (including shell
/// status 126/127).
SolverRun run_solver(const SolverSpec& spec, const std::filesystem::path& cnf_path);

struct Difficulty {
    std::uint32_t failed = 0;
    /// Mean charged seconds over solved runs; present iff failed <= 1 and
    /// at least one run was solved.
    std::optional<double> mean_easy_seconds;

    /// "3", or "0 (148 s)" for easy formulas.
    std::string label() const;
};

/// Number of runs that are neither Sat nor Unsat. Throws
/// Error(InconsistentVerdicts) if Sat and Unsat both occur.
Difficulty difficulty(std::span<const SolverRun> runs);

enum class SelectMode { And, Or };

struct Selection {
    bool keep = true;
    std::string reason; // empty when kept

    friend bool operator==(const Selection&, const Selection&) = default;
};

/// Too-easy filter. `quick`: some run is solved in under `easy_threshold`.
/// `bounded`: every run is solved within `hard_threshold`. And mode rejects
/// when both hold, Or mode when either does.
Selection select(std::span<const SolverRun> runs, Seconds easy_threshold = Seconds{60.0},
                 Seconds hard_threshold = Seconds{7200.0}, SelectMode mode = SelectMode::And);

struct Portfolio {
    std::vector<SolverSpec> solvers;
    Seconds easy_threshold{60.0};
    Seconds hard_threshold{7200.0};
    SelectMode mode = SelectMode::And;

    const SolverSpec& find(std::string_view name) const;
};

/// JSON portfolio:
/// {"solvers": [{"name", "command", "timeout", "clock": "cpu"|"wall"}...],
///  "easy_threshold", "hard_threshold", "mode": "and"|"or"}
Portfolio parse_portfolio(std::string_view json_text);
Portfolio load_portfolio(const std::filesystem::path& path);

enum class FormulaType { Sat, Unsat, Unknown };

std::string_view to_string(FormulaType t);

struct BenchRecord {
    std::string id;
    std::uint64_t num_vars = 0;
    std::uint64_t num_clauses = 0;
    FormulaType type = FormulaType::Unknown;
    std::uint32_t difficulty = 0;
    std::optional<double> mean_easy_seconds;
    Selection selection;
};

/// Builds the record for one formula from its portfolio runs.
BenchRecord make_record(std::string id, std::uint64_t num_vars, std::uint64_t num_clauses,
                        std::span<const SolverRun> runs, const Portfolio& portfolio);

// Unit-count probing -------------------------------------------------------

struct InternalSolver {
    Budget budget;
};

using SolverChoice = std::variant<InternalSolver, SolverSpec>;

struct ProbeOptions {
    bool symmetry = true;
    /// Scratch directory for formulas handed to external solvers.
    std::filesystem::path workdir = std::filesystem::temp_directory_path();
};

struct SweepPoint {
    std::uint32_t units = 0;
    SolveStatus verdict = SolveStatus::Unknown;
    double seconds = 0;
    std::optional<std::uint64_t> decisions; // internal solver only
};

/// Encodes and solves for one unit count. External Sat answers are
/// re-verified by decoding the model and checking the partition; a model
/// that fails the check yields Unknown.
SweepPoint probe_units(const ConcurrencyRelation& rel, UnitCount n, const SolverChoice& solver,
                       const ProbeOptions& options = {});

/// One probe per n in [first, last]. Throws Error(NonMonotoneVerdicts) if an
/// Unsat follows a Sat.
std::vector<SweepPoint> sweep_units(const ConcurrencyRelation& rel, std::uint32_t first, std::uint32_t last,
                                    const SolverChoice& solver, const ProbeOptions& options = {});

void check_monotone(std::span<const SweepPoint> points);

/// `n,verdict,decisions` and, with `timing`, a trailing `seconds` column.
void emit_sweep_csv(std::span<const SweepPoint> points, std::ostream& out, bool timing);

/// Smallest satisfiable n, by binary search over [1, upper_hint]; the hint
/// must be the size of a known proper coloring. Throws Error(SolverUnknown)
/// if a probe is inconclusive.
std::uint32_t minimal_units(const ConcurrencyRelation& rel, const SolverChoice& solver, std::uint32_t upper_hint,
                            const ProbeOptions& options = {});

// Benchmark campaign -------------------------------------------------------

struct BenchTask {
    std::string id;
    const ConcurrencyRelation* relation;
    UnitCount units;
    bool symmetry = true;
};

struct BenchOptions {
    std::filesystem::path out_dir;
    unsigned jobs = 1;
    std::optional<std::string> compress_command;
};

struct BenchResult {
    std::vector<BenchRecord> records;                     // sorted by id
    std::vector<std::pair<std::string, SolverRun>> runs; // (formula id, run), sorted by id then portfolio order
};

/// Writes `<out_dir>/<id>.cnf` for each task, runs every portfolio solver on
/// it and scores the result. Formulas are processed by up to `jobs` workers.
BenchResult run_bench(std::span<const BenchTask> tasks, const Portfolio& portfolio, const BenchOptions& options);

void emit_records_csv(std::span<const BenchRecord> records, std::ostream& out);
std::vector<BenchRecord> parse_records_csv(std::string_view text);
void emit_runs_csv(std::span<const std::pair<std::string, SolverRun>> runs, std::ostream& out);

enum class ReportFilter { All, Kept, Sat, Unsat };

/// `variables,clauses,type,difficulty` per record passing `filter`. Throws
/// Error(EmptyReport) when nothing passes.
void dispersion_report(std::span<const BenchRecord> records, std::ostream& out,
                       ReportFilter filter = ReportFilter::All);

} // namespace nupnsat
