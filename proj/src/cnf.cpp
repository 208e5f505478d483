#include "nupnsat/cnf.hpp"

#include "nupnsat/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <istream>
#include <ostream>

namespace nupnsat {

std::string check_formula(const CnfFormula& f)
{
    Clause sorted;
    for (std::size_t i = 0; i < f.clauses.size(); ++i) {
        const auto& c = f.clauses[i];
        auto where = "clause " + std::to_string(i + 1) + ": ";
        if (c.empty())
            return where + "empty";
        sorted = c;
        for (auto lit : sorted) {
            if (lit == 0 || lit == INT32_MIN || static_cast<std::uint32_t>(std::abs(lit)) > f.num_vars)
                return where + "literal " + std::to_string(lit) + " out of range";
        }
        std::sort(sorted.begin(), sorted.end(), [](Literal a, Literal b) {
            return std::abs(a) != std::abs(b) ? std::abs(a) < std::abs(b) : a < b;
        });
        for (std::size_t k = 1; k < sorted.size(); ++k) {
            if (sorted[k] == sorted[k - 1])
                return where + "repeated literal " + std::to_string(sorted[k]);
            if (sorted[k] == -sorted[k - 1])
                return where + "complementary literals on variable " + std::to_string(std::abs(sorted[k]));
        }
    }
    return {};
}

bool satisfies(const CnfFormula& f, const Assignment& a)
{
    if (a.num_vars() < f.num_vars)
        return false;
    return std::all_of(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) {
        return std::any_of(c.begin(), c.end(), [&](Literal l) { return a.satisfies(l); });
    });
}

DimacsWriter::DimacsWriter(std::ostream& out, std::size_t buffer_bytes)
    : out_(out), buf_(std::max<std::size_t>(buffer_bytes, 4096))
{
}

DimacsWriter::~DimacsWriter()
{
    if (used_ != 0 && out_.good())
        out_.write(buf_.data(), static_cast<std::streamsize>(used_));
}

void DimacsWriter::flush()
{
    out_.write(buf_.data(), static_cast<std::streamsize>(used_));
    used_ = 0;
    if (!out_)
        throw Error(Errc::Io, "write failed");
}

void DimacsWriter::reserve(std::size_t bytes)
{
    if (buf_.size() - used_ < bytes) {
        flush();
        if (buf_.size() < bytes)
            buf_.resize(bytes);
    }
}

void DimacsWriter::header(std::span<const std::pair<std::string, std::string>> metadata, std::uint64_t num_vars,
                          std::uint64_t num_clauses)
{
    std::string text;
    for (const auto& [key, value] : metadata) {
        text += "c ";
        text += key;
        if (!value.empty()) {
            text += ' ';
            text += value;
        }
        text += '\n';
    }
    text += "p cnf " + std::to_string(num_vars) + ' ' + std::to_string(num_clauses) + '\n';
    reserve(text.size());
    std::memcpy(buf_.data() + used_, text.data(), text.size());
    used_ += text.size();
    expected_ = num_clauses;
}

void DimacsWriter::clause(std::span<const Literal> literals)
{
    // 11 chars per literal plus a separator, then "0\n"
    reserve(literals.size() * 12 + 2);
    char* p = buf_.data() + used_;
    for (auto lit : literals) {
        p = std::to_chars(p, p + 11, lit).ptr;
        *p++ = ' ';
    }
    *p++ = '0';
    *p++ = '\n';
    used_ = static_cast<std::size_t>(p - buf_.data());
    ++written_;
}

void DimacsWriter::finish()
{
    if (written_ != expected_)
        throw Error(Errc::MalformedCnf,
                    "header announced " + std::to_string(expected_) + " clauses, wrote " + std::to_string(written_));
    flush();
    out_.flush();
    if (!out_)
        throw Error(Errc::Io, "write failed");
}

void emit_dimacs(const CnfFormula& f, std::ostream& out)
{
    DimacsWriter w(out);
    w.header(f.metadata, f.num_vars, f.clauses.size());
    for (const auto& c : f.clauses)
        w.clause(c);
    w.finish();
}

CnfFormula parse_dimacs(std::string_view text)
{
    CnfFormula f;
    bool have_header = false;
    bool done = false;
    std::uint64_t announced = 0;
    Clause current;
    detail::for_each_line(text, '\0', [&](std::size_t line, const std::vector<std::string_view>& tok) {
        if (done)
            return;
        if (tok[0] == "c") {
            if (!have_header && tok.size() >= 2) {
                std::string value;
                for (std::size_t i = 2; i < tok.size(); ++i) {
                    if (!value.empty())
                        value += ' ';
                    value += tok[i];
                }
                f.metadata.emplace_back(std::string(tok[1]), std::move(value));
            }
            return;
        }
        if (tok[0] == "%") {
            done = true;
            return;
        }
        if (tok[0] == "p") {
            if (have_header)
                throw Error(Errc::MalformedCnf, "second problem line", line);
            if (tok.size() != 4 || tok[1] != "cnf" || !detail::parse_int(tok[2], f.num_vars)
                || !detail::parse_int(tok[3], announced) || f.num_vars > INT32_MAX)
                throw Error(Errc::MalformedCnf, "expected: p cnf <vars> <clauses>", line);
            have_header = true;
            f.clauses.reserve(std::min<std::uint64_t>(announced, 1u << 24));
            return;
        }
        if (!have_header)
            throw Error(Errc::MalformedCnf, "clause before problem line", line);
        for (auto t : tok) {
            Literal lit = 0;
            if (!detail::parse_int(t, lit) || lit == INT32_MIN)
                throw Error(Errc::MalformedCnf, "bad literal \"" + std::string(t) + "\"", line);
            if (lit == 0) {
                if (current.empty())
                    throw Error(Errc::MalformedCnf, "empty clause", line);
                f.clauses.push_back(std::move(current));
                current.clear();
            } else {
                if (static_cast<std::uint32_t>(std::abs(lit)) > f.num_vars)
                    throw Error(Errc::MalformedCnf, "literal " + std::to_string(lit) + " exceeds variable count", line);
                current.push_back(lit);
            }
        }
    });
    if (!have_header)
        throw Error(Errc::MalformedCnf, "missing problem line");
    if (!current.empty())
        throw Error(Errc::MalformedCnf, "last clause not terminated by 0");
    if (f.clauses.size() != announced)
        throw Error(Errc::MalformedCnf, "header announced " + std::to_string(announced) + " clauses, found "
                                            + std::to_string(f.clauses.size()));
    if (auto problem = check_formula(f); !problem.empty())
        throw Error(Errc::MalformedCnf, problem);
    return f;
}

DimacsHeader read_dimacs_header(std::istream& in)
{
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == 'c')
            continue;
        DimacsHeader h;
        bool ok = false;
        detail::for_each_line(line, '\0', [&](std::size_t, const std::vector<std::string_view>& tok) {
            ok = tok.size() == 4 && tok[0] == "p" && tok[1] == "cnf" && detail::parse_int(tok[2], h.num_vars)
                && detail::parse_int(tok[3], h.num_clauses);
        });
        if (!ok)
            throw Error(Errc::MalformedCnf, "expected: p cnf <vars> <clauses>", line_no);
        return h;
    }
    throw Error(Errc::MalformedCnf, "missing problem line");
}

Assignment parse_model(std::string_view text, std::uint32_t num_vars)
{
    enum class Status { None, Sat, Unsat, Other } status = Status::None;
    Assignment a(num_vars);
    std::vector<bool> mentioned(num_vars, false);
    bool have_values = false;
    bool terminated = false;

    detail::for_each_line(text, '\0', [&](std::size_t line, const std::vector<std::string_view>& tok) {
        if (tok[0] == "s") {
            if (status != Status::None)
                throw Error(Errc::MalformedModel, "second status line", line);
            if (tok.size() == 2 && tok[1] == "SATISFIABLE")
                status = Status::Sat;
            else if (tok.size() == 2 && tok[1] == "UNSATISFIABLE")
                status = Status::Unsat;
            else
                status = Status::Other;
        } else if (tok[0] == "v") {
            have_values = true;
            for (std::size_t i = 1; i < tok.size(); ++i) {
                Literal lit = 0;
                if (!detail::parse_int(tok[i], lit) || lit == INT32_MIN)
                    throw Error(Errc::MalformedModel, "bad literal \"" + std::string(tok[i]) + "\"", line);
                if (terminated)
                    throw Error(Errc::MalformedModel, "values after terminating 0", line);
                if (lit == 0) {
                    terminated = true;
                    continue;
                }
                auto var = static_cast<std::uint32_t>(std::abs(lit));
                if (var > num_vars)
                    throw Error(Errc::MalformedModel, "variable " + std::to_string(var) + " out of range", line);
                if (mentioned[var - 1] && a.value(VarId{var}) != (lit > 0))
                    throw Error(Errc::MalformedModel, "variable " + std::to_string(var) + " given both values", line);
                mentioned[var - 1] = true;
                a.set(VarId{var}, lit > 0);
            }
        }
    });

    switch (status) {
    case Status::Unsat: throw Error(Errc::UnsatResult, "solver reported UNSATISFIABLE");
    case Status::None: throw Error(Errc::MalformedModel, "no status line");
    case Status::Other: throw Error(Errc::MalformedModel, "status is neither SATISFIABLE nor UNSATISFIABLE");
    case Status::Sat: break;
    }
    if (!have_values || !terminated)
        throw Error(Errc::MalformedModel, "value lines missing or not terminated by 0");
    return a;
}

void emit_model(const Assignment& a, std::ostream& out)
{
    out << "s SATISFIABLE\n";
    constexpr std::uint32_t per_line = 10;
    for (std::uint32_t v = 1; v <= a.num_vars(); v += per_line) {
        out << 'v';
        for (std::uint32_t w = v; w < v + per_line && w <= a.num_vars(); ++w)
            out << ' ' << (a.value(VarId{w}) ? static_cast<Literal>(w) : -static_cast<Literal>(w));
        out << '\n';
    }
    out << "v 0\n";
}

} // namespace nupnsat
