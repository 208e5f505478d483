#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nupnsat {

/// DIMACS literal: +v or -v for variable v >= 1.
using Literal = std::int32_t;
using Clause = std::vector<Literal>;

struct VarId {
    std::uint32_t value = 0;

    friend constexpr auto operator<=>(VarId, VarId) = default;
};

struct CnfFormula {
    std::uint32_t num_vars = 0;
    std::vector<Clause> clauses;
    /// Written as `c <key> <value>` lines ahead of the problem line.
    std::vector<std::pair<std::string, std::string>> metadata;

    friend bool operator==(const CnfFormula&, const CnfFormula&) = default;
};

/// Checks the clause invariants: nonempty, literals nonzero and within
/// num_vars, no repeated or complementary literals. Returns a description of
/// the first problem, or an empty string.
std::string check_formula(const CnfFormula& f);

/// Total truth assignment over variables 1..num_vars.
class Assignment {
public:
    Assignment() = default;
    explicit Assignment(std::uint32_t num_vars) : values_(num_vars, false) {}

    std::uint32_t num_vars() const { return static_cast<std::uint32_t>(values_.size()); }
    bool value(VarId v) const { return values_[v.value - 1]; }
    void set(VarId v, bool b) { values_[v.value - 1] = b; }
    bool satisfies(Literal lit) const { return lit > 0 ? value(VarId{std::uint32_t(lit)}) : !value(VarId{std::uint32_t(-lit)}); }

    friend bool operator==(const Assignment&, const Assignment&) = default;

private:
    std::vector<bool> values_;
};

bool satisfies(const CnfFormula& f, const Assignment& a);

/// Buffered DIMACS writer. Call header() once, then clause() exactly
/// num_clauses times, then finish(). Throws Error(Io) when the stream fails.
class DimacsWriter {
public:
    explicit DimacsWriter(std::ostream& out, std::size_t buffer_bytes = std::size_t{1} << 20);
    ~DimacsWriter();

    DimacsWriter(const DimacsWriter&) = delete;
    DimacsWriter& operator=(const DimacsWriter&) = delete;

    void header(std::span<const std::pair<std::string, std::string>> metadata, std::uint64_t num_vars,
                std::uint64_t num_clauses);
    void clause(std::span<const Literal> literals);
    void finish();

private:
    void reserve(std::size_t bytes);
    void flush();

    std::ostream& out_;
    std::vector<char> buf_;
    std::size_t used_ = 0;
    std::uint64_t expected_ = 0;
    std::uint64_t written_ = 0;
};

void emit_dimacs(const CnfFormula& f, std::ostream& out);

/// Parses DIMACS CNF. `c key value` comments become metadata. Throws
/// Error(MalformedCnf) on header/clause-count mismatch or invalid clauses.
CnfFormula parse_dimacs(std::string_view text);

struct DimacsHeader {
    std::uint64_t num_vars = 0;
    std::uint64_t num_clauses = 0;
};

/// Reads up to the `p cnf` line without loading the clauses.
DimacsHeader read_dimacs_header(std::istream& in);

/// Reads solver output (`s` status line, `v` value lines ending in 0).
/// Variables not mentioned default to false. Throws Error(UnsatResult) for
/// `s UNSATISFIABLE`, Error(MalformedModel) for anything else that is not a
/// complete model.
Assignment parse_model(std::string_view text, std::uint32_t num_vars);

/// `s SATISFIABLE` + `v` lines for a model.
void emit_model(const Assignment& a, std::ostream& out);

} // namespace nupnsat
