#include "nupnsat/encode.hpp"

#include "nupnsat/error.hpp"
#include "text_util.hpp"

#include <cstdio>
#include <limits>
#include <ostream>

namespace nupnsat {

UnitCount::UnitCount(std::uint32_t n) : n_(n)
{
    if (n == 0)
        throw Error(Errc::UnitOutOfRange, "unit count must be at least 1");
}

VarId var_index(PlaceIndex p, std::uint32_t unit, UnitCount n)
{
    if (unit < 1 || unit > n.value())
        throw Error(Errc::UnitOutOfRange, "unit " + std::to_string(unit) + " not in [1, " + std::to_string(n.value()) + "]");
    if (p.value < 1)
        throw Error(Errc::IndexOutOfRange, "place index must be at least 1");
    auto v = std::uint64_t{p.value - 1} * n.value() + unit;
    if (v > static_cast<std::uint64_t>(std::numeric_limits<Literal>::max()))
        throw Error(Errc::TooLarge, "variable index overflows a DIMACS literal");
    return VarId{static_cast<std::uint32_t>(v)};
}

UnitEncoding::UnitEncoding(const ConcurrencyRelation& rel, UnitCount n, bool symmetry)
    : rel_(&rel), n_(n), symmetry_(symmetry)
{
    if (num_vars() > static_cast<std::uint64_t>(std::numeric_limits<Literal>::max()))
        throw Error(Errc::TooLarge, std::to_string(num_vars()) + " variables overflow a DIMACS literal");
}

std::vector<std::pair<std::string, std::string>> UnitEncoding::metadata() const
{
    char hash[17];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(rel_->hash()));
    return {
        {"generator", std::string(generator_id)},
        {"relation-hash", hash},
        {"places", std::to_string(rel_->place_count())},
        {"units", std::to_string(n_.value())},
        {"symmetry", symmetry_ ? "on" : "off"},
    };
}

CnfFormula encode(const ConcurrencyRelation& rel, UnitCount n, bool symmetry)
{
    UnitEncoding enc(rel, n, symmetry);
    CnfFormula f;
    f.num_vars = static_cast<std::uint32_t>(enc.num_vars());
    f.metadata = enc.metadata();
    f.clauses.reserve(enc.num_clauses());
    enc.for_each_clause([&](std::span<const Literal> c) { f.clauses.emplace_back(c.begin(), c.end()); });
    return f;
}

void emit_dimacs(const UnitEncoding& enc, std::ostream& out)
{
    DimacsWriter w(out);
    w.header(enc.metadata(), enc.num_vars(), enc.num_clauses());
    enc.for_each_clause([&](std::span<const Literal> c) { w.clause(c); });
    w.finish();
}

UnitAssignment::UnitAssignment(UnitCount n, std::vector<std::uint32_t> unit_of) : n_(n), unit_of_(std::move(unit_of))
{
    for (std::size_t i = 0; i < unit_of_.size(); ++i) {
        if (unit_of_[i] < 1 || unit_of_[i] > n_.value())
            throw Error(Errc::UnitOutOfRange, "place " + std::to_string(i + 1) + " assigned unit "
                                                  + std::to_string(unit_of_[i]));
    }
}

UnitAssignment decode(const Assignment& a, std::size_t place_count, UnitCount n)
{
    if (std::uint64_t{place_count} * n.value() > a.num_vars())
        throw Error(Errc::MalformedModel, "assignment has " + std::to_string(a.num_vars()) + " variables, need "
                                              + std::to_string(std::uint64_t{place_count} * n.value()));
    std::vector<std::uint32_t> unit_of(place_count, 0);
    for (std::uint32_t p = 1; p <= place_count; ++p) {
        for (std::uint32_t u = 1; u <= n.value(); ++u) {
            if (a.value(var_index(PlaceIndex{p}, u, n))) {
                unit_of[p - 1] = u;
                break;
            }
        }
        if (unit_of[p - 1] == 0)
            throw Error(Errc::NoUnit, "place " + std::to_string(p) + " is in no unit");
    }
    return UnitAssignment(n, std::move(unit_of));
}

std::vector<PartitionViolation> verify_partition(const UnitAssignment& ua, const ConcurrencyRelation& rel)
{
    if (ua.place_count() != rel.place_count())
        throw Error(Errc::IndexOutOfRange, "assignment covers " + std::to_string(ua.place_count())
                                               + " places, relation has " + std::to_string(rel.place_count()));
    std::vector<PartitionViolation> out;
    for (auto [p, q] : rel.pairs()) {
        auto u = ua.unit(PlaceIndex{p});
        if (u == ua.unit(PlaceIndex{q}))
            out.push_back({PlaceIndex{p}, PlaceIndex{q}, u});
    }
    return out;
}

void emit_units(const UnitAssignment& ua, std::ostream& out)
{
    out << "units " << ua.units().value() << " places " << ua.place_count() << '\n';
    for (std::uint32_t p = 1; p <= ua.place_count(); ++p)
        out << p << ' ' << ua.unit(PlaceIndex{p}) << '\n';
}

UnitAssignment parse_units(std::string_view text)
{
    bool have_header = false;
    std::uint32_t n = 0;
    std::size_t places = 0;
    std::vector<std::uint32_t> unit_of;
    detail::for_each_line(text, '#', [&](std::size_t line, const std::vector<std::string_view>& tok) {
        if (!have_header) {
            if (tok.size() != 4 || tok[0] != "units" || tok[2] != "places" || !detail::parse_int(tok[1], n)
                || !detail::parse_int(tok[3], places) || n == 0)
                throw Error(Errc::Syntax, "expected header: units <n> places <k>", line);
            have_header = true;
            unit_of.assign(places, 0);
            return;
        }
        std::uint32_t p = 0;
        std::uint32_t u = 0;
        if (tok.size() != 2 || !detail::parse_int(tok[0], p) || !detail::parse_int(tok[1], u))
            throw Error(Errc::Syntax, "expected: <place> <unit>", line);
        if (p < 1 || p > places)
            throw Error(Errc::IndexOutOfRange, "place " + std::to_string(p), line);
        if (u < 1 || u > n)
            throw Error(Errc::UnitOutOfRange, "unit " + std::to_string(u), line);
        if (unit_of[p - 1] != 0)
            throw Error(Errc::Syntax, "place " + std::to_string(p) + " assigned twice", line);
        unit_of[p - 1] = u;
    });
    if (!have_header)
        throw Error(Errc::Syntax, "missing header: units <n> places <k>");
    for (std::size_t i = 0; i < unit_of.size(); ++i) {
        if (unit_of[i] == 0)
            throw Error(Errc::NoUnit, "place " + std::to_string(i + 1) + " is in no unit");
    }
    return UnitAssignment(UnitCount(n), std::move(unit_of));
}

} // namespace nupnsat
