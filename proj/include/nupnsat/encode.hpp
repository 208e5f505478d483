#pragma once

#include "nupnsat/cnf.hpp"
#include "nupnsat/index.hpp"
#include "nupnsat/reachability.hpp"

#include <algorithm>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nupnsat {

/// Number of units n >= 1. Units are identified by their index in [1, n].
class UnitCount {
public:
    explicit UnitCount(std::uint32_t n);

    std::uint32_t value() const { return n_; }

    friend constexpr auto operator<=>(UnitCount, UnitCount) = default;

private:
    std::uint32_t n_;
};

/// Variable "place p is in unit u", numbered place-major: (p-1)*n + u.
/// Throws Error(UnitOutOfRange) unless 1 <= u <= n.
VarId var_index(PlaceIndex p, std::uint32_t unit, UnitCount n);

inline constexpr std::string_view generator_id = "nupnsat 1.0.0";

/// Lazy view of the unit-partition formula for a relation and a unit count.
///
/// Clause order: for each pair {p, q} (p < q) in relation order and each unit
/// u in 1..n, (-x_pu | -x_qu); then for each place p, the membership clause
/// x_p1 | ... | x_pk with k = min(p, n) when symmetry breaking is on, k = n
/// otherwise. Conflict clauses cover every unit either way.
class UnitEncoding {
public:
    UnitEncoding(const ConcurrencyRelation& rel, UnitCount n, bool symmetry = true);

    std::uint64_t num_vars() const { return std::uint64_t{rel_->place_count()} * n_.value(); }
    std::uint64_t num_clauses() const
    {
        return std::uint64_t{n_.value()} * rel_->pair_count() + rel_->place_count();
    }
    UnitCount units() const { return n_; }
    bool symmetry() const { return symmetry_; }
    const ConcurrencyRelation& relation() const { return *rel_; }

    /// `c` header fields: generator, relation hash, places, units, symmetry.
    std::vector<std::pair<std::string, std::string>> metadata() const;

    /// Calls `fn(std::span<const Literal>)` once per clause, in order.
    template <class Fn>
    void for_each_clause(Fn&& fn) const
    {
        const auto n = static_cast<Literal>(n_.value());
        Literal lits[2];
        for (auto [p, q] : rel_->pairs()) {
            const Literal base_p = (static_cast<Literal>(p) - 1) * n;
            const Literal base_q = (static_cast<Literal>(q) - 1) * n;
            for (Literal u = 1; u <= n; ++u) {
                lits[0] = -(base_p + u);
                lits[1] = -(base_q + u);
                fn(std::span<const Literal>(lits, 2));
            }
        }
        std::vector<Literal> member(static_cast<std::size_t>(n));
        const auto places = static_cast<Literal>(rel_->place_count());
        for (Literal p = 1; p <= places; ++p) {
            const Literal width = symmetry_ ? std::min(p, n) : n;
            for (Literal u = 1; u <= width; ++u)
                member[static_cast<std::size_t>(u - 1)] = (p - 1) * n + u;
            fn(std::span<const Literal>(member.data(), static_cast<std::size_t>(width)));
        }
    }

private:
    const ConcurrencyRelation* rel_;
    UnitCount n_;
    bool symmetry_;
};

/// Materialized formula, metadata included.
CnfFormula encode(const ConcurrencyRelation& rel, UnitCount n, bool symmetry = true);

/// Streams the formula as DIMACS without materializing the clause list.
void emit_dimacs(const UnitEncoding& enc, std::ostream& out);

/// Total map place -> unit in [1, n].
class UnitAssignment {
public:
    UnitAssignment(UnitCount n, std::vector<std::uint32_t> unit_of);

    UnitCount units() const { return n_; }
    std::size_t place_count() const { return unit_of_.size(); }
    std::uint32_t unit(PlaceIndex p) const { return unit_of_[p.offset()]; }
    std::span<const std::uint32_t> units_by_place() const { return unit_of_; }

    friend bool operator==(const UnitAssignment&, const UnitAssignment&) = default;

private:
    UnitCount n_;
    std::vector<std::uint32_t> unit_of_;
};

/// Each place goes to the lowest unit whose variable is true. The encoding
/// has no at-most-one constraint, so several may be true. Throws
/// Error(NoUnit) when none is.
UnitAssignment decode(const Assignment& a, std::size_t place_count, UnitCount n);

struct PartitionViolation {
    PlaceIndex first;
    PlaceIndex second;
    std::uint32_t unit;

    friend bool operator==(const PartitionViolation&, const PartitionViolation&) = default;
};

/// Concurrent pairs sharing a unit, in relation order. Empty iff the
/// assignment is a proper partition.
std::vector<PartitionViolation> verify_partition(const UnitAssignment& ua, const ConcurrencyRelation& rel);

/// `.units` text: `units <n> places <k>`, then `<place> <unit>` per place.
void emit_units(const UnitAssignment& ua, std::ostream& out);
UnitAssignment parse_units(std::string_view text);

} // namespace nupnsat
