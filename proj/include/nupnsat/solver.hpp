#pragma once

#include "nupnsat/cnf.hpp"
#include "nupnsat/encode.hpp"
#include "nupnsat/reachability.hpp"

#include <chrono>
#include <cstdint>
#include <span>
#include <string>

namespace nupnsat {

struct Budget {
    std::uint64_t max_decisions = 10'000'000;
    std::chrono::duration<double> max_seconds{60.0};
};

enum class SolveStatus { Sat, Unsat, Unknown };

std::string_view to_string(SolveStatus s);

struct SolveStats {
    std::uint64_t decisions = 0;
    std::uint64_t propagations = 0;
    std::uint64_t pure_literals = 0;
    double seconds = 0.0;
};

struct SolveOutcome {
    SolveStatus status = SolveStatus::Unknown;
    Assignment model;   // total and satisfying when status == Sat
    std::string reason; // why the budget ran out when status == Unknown
    SolveStats stats;
};

/// DPLL: unit propagation over two watched literals, chronological
/// backtracking, no learning. Branches on the lowest unassigned variable,
/// trying true first, unless that variable is pure (one polarity occurs only
/// in satisfied clauses), in which case the pure polarity is set without a
/// decision. A Sat model is checked against every clause before returning.
SolveOutcome dpll_solve(const CnfFormula& f, const Budget& budget = {});

inline constexpr std::size_t brute_force_max_places = 12;

/// Smallest k >= 1 admitting a proper k-coloring, by exhaustive enumeration
/// of colorings (in first-occurrence normal form). Throws Error(TooLarge)
/// above brute_force_max_places.
std::uint32_t brute_force_chromatic(const ConcurrencyRelation& rel);

struct Coloring {
    std::uint32_t colors;
    UnitAssignment assignment;
};

/// First-fit: each place in `order` takes the lowest color unused by its
/// already colored neighbors. `order` must be a permutation of the places.
Coloring greedy_coloring(const ConcurrencyRelation& rel, std::span<const PlaceIndex> order);
/// First-fit in index order.
Coloring greedy_coloring(const ConcurrencyRelation& rel);

} // namespace nupnsat
