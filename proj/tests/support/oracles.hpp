#pragma once

// Test-side reference implementations. They share no code with the library
// algorithms they check: reachability runs on raw integer masks, satisfiability
// by enumeration, colorings by plain backtracking.

#include "nupnsat/cnf.hpp"
#include "nupnsat/net.hpp"
#include "nupnsat/reachability.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

/// Marking as a bit mask, bit i-1 for place i. Nets up to 32 places.
using Mask = std::uint32_t;

struct Reachable {
    std::vector<Mask> markings; // increasing mask order
    bool unsafe = false;
};

/// Enumerates all 2^|P| candidate markings and keeps those reachable from the
/// initial marking under the firing rule.
Reachable reachable_markings(const nupnsat::PetriNet& net);

Mask to_mask(const nupnsat::Marking& m);

/// Pairs (i, j), i < j, co-marked in some marking.
std::set<std::pair<std::uint32_t, std::uint32_t>> co_marked(const std::vector<Mask>& markings, std::size_t places);

/// Satisfiability by exhaustive truth-table evaluation (num_vars <= 24).
bool truth_table_sat(const nupnsat::CnfFormula& f);

/// Number of satisfying total assignments, by backtracking with clause checks.
std::uint64_t count_models(const nupnsat::CnfFormula& f);

/// A proper coloring with colors 1..k, if one exists. Plain backtracking.
std::optional<std::vector<std::uint32_t>> find_coloring(const nupnsat::ConcurrencyRelation& rel, std::uint32_t k);

std::uint32_t chromatic_number(const nupnsat::ConcurrencyRelation& rel);

/// Relabels colors by order of first appearance along places 1..|P|.
std::vector<std::uint32_t> normalize(const std::vector<std::uint32_t>& coloring);

/// x_pu true exactly for u = coloring[p-1].
nupnsat::Assignment witness(const std::vector<std::uint32_t>& coloring, std::uint32_t n);

/// Uniformly random formula with clauses of width 1..3 over `vars` variables.
nupnsat::CnfFormula random_cnf(std::uint64_t seed, std::uint32_t vars, std::size_t clauses);

} // namespace oracle
