#pragma once

#include "nupnsat/error.hpp"
#include "nupnsat/index.hpp"
#include "nupnsat/net.hpp"

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

namespace nupnsat {

/// Set of marked places of a safe net, stored as a bitset.
class Marking {
public:
    Marking() = default;
    explicit Marking(std::size_t place_count);
    Marking(std::size_t place_count, std::span<const PlaceIndex> marked);

    std::size_t place_count() const { return place_count_; }
    bool contains(PlaceIndex p) const;
    void insert(PlaceIndex p);
    void erase(PlaceIndex p);
    std::size_t size() const;

    /// Marked places in increasing order.
    std::vector<PlaceIndex> places() const;

    std::span<const std::uint64_t> words() const { return words_; }

    friend bool operator==(const Marking&, const Marking&) = default;
    friend auto operator<=>(const Marking& a, const Marking& b) { return a.places() <=> b.places(); }

private:
    std::size_t place_count_ = 0;
    std::vector<std::uint64_t> words_;
};

struct ExploreLimits {
    std::size_t max_markings = 1'000'000;
    std::chrono::duration<double> max_seconds{60.0};
};

/// Thrown when a firing would put a second token on a place. `trace` is the
/// firing sequence from the initial marking; its last transition is the
/// offending one.
class UnsafeNetError : public Error {
public:
    UnsafeNetError(std::vector<TransitionIndex> trace, PlaceIndex place, std::string message);

    const std::vector<TransitionIndex>& trace() const noexcept { return trace_; }
    PlaceIndex place() const noexcept { return place_; }

private:
    std::vector<TransitionIndex> trace_;
    PlaceIndex place_;
};

/// Breadth-first enumeration of the reachable markings, in discovery order
/// (FIFO queue, transitions tried in declaration order). The first element is
/// the initial marking.
///
/// Throws UnsafeNetError if some firing would mark an already marked place
/// (self-loops are fine since pre-places are unmarked first), and
/// Error(LimitExceeded) if either limit is hit.
std::vector<Marking> explore(const PetriNet& net, const ExploreLimits& limits = {});

/// Symmetric, irreflexive relation over places 1..place_count, stored as the
/// sorted list of pairs (i, j) with i < j.
class ConcurrencyRelation {
public:
    using Pair = std::pair<std::uint32_t, std::uint32_t>;

    ConcurrencyRelation() = default;
    /// Normalizes orientation and order. Throws on i == j, out-of-range
    /// indices and repeated pairs.
    ConcurrencyRelation(std::size_t place_count, std::vector<Pair> pairs);

    std::size_t place_count() const { return place_count_; }
    std::span<const Pair> pairs() const { return pairs_; }
    std::size_t pair_count() const { return pairs_.size(); }
    bool contains(PlaceIndex a, PlaceIndex b) const;

    /// Adjacency lists, 0-based: neighbors()[i] holds 0-based neighbors of place i+1.
    std::vector<std::vector<std::uint32_t>> adjacency() const;

    /// FNV-1a over the place count and the canonical pair list.
    std::uint64_t hash() const;

    friend bool operator==(const ConcurrencyRelation&, const ConcurrencyRelation&) = default;

private:
    std::size_t place_count_ = 0;
    std::vector<Pair> pairs_;
};

/// {i, j} is in the result iff some marking holds both i and j.
ConcurrencyRelation concurrency_relation(std::span<const Marking> markings, std::size_t place_count);

/// `.crel` text: `places <k>` then one `<i> <j>` line per pair.
void emit_relation(const ConcurrencyRelation& rel, std::ostream& out);
ConcurrencyRelation parse_relation(std::string_view text);

struct UnitSafetyViolation {
    std::size_t marking; // index into the explored markings
    std::size_t unit;    // index into Nupn::units
    std::vector<PlaceIndex> marked;

    friend bool operator==(const UnitSafetyViolation&, const UnitSafetyViolation&) = default;
};

/// Units holding more than one token in some marking.
std::vector<UnitSafetyViolation> check_unit_safety(const Nupn& nupn, std::span<const Marking> markings);

} // namespace nupnsat
