#pragma once

// Seeded instance generators for test corpora and benchmarks. Output depends
// only on the arguments.

#include "nupnsat/net.hpp"
#include "nupnsat/reachability.hpp"

#include <cstdint>
#include <random>

namespace nupnsat {

using Rng = std::mt19937_64;

/// Uniform in [0, bound), bound > 0. Plain modulo keeps results identical
/// across standard libraries.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) { return rng() % bound; }

/// Each of the place_count*(place_count-1)/2 pairs is included with
/// probability `density`.
ConcurrencyRelation random_relation(std::uint64_t seed, std::size_t place_count, double density);

/// Exactly `pair_count` distinct pairs drawn uniformly.
ConcurrencyRelation random_relation_with_pairs(std::uint64_t seed, std::size_t place_count, std::size_t pair_count);

/// Graph with chromatic number exactly `colors`: places are split into
/// `colors` classes, pairs across classes are added with probability
/// `density`, and one place per class forms a clique. Labels are shuffled.
ConcurrencyRelation planted_partition(std::uint64_t seed, std::size_t place_count, std::uint32_t colors,
                                      double density);

/// Safe-by-construction net: places are split into sequential components
/// holding one token each; transitions move tokens inside one component or
/// synchronize two. The components are returned as the units.
Nupn random_safe_net(std::uint64_t seed, std::size_t place_count, std::size_t transition_count);

/// Arbitrary ordinary net (may be unsafe).
PetriNet random_net(std::uint64_t seed, std::size_t place_count, std::size_t transition_count);

} // namespace nupnsat
