#include "nupnsat/generate.hpp"

#include "nupnsat/error.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace nupnsat {

namespace {

bool coin(Rng& rng, double p) { return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p; }

template <class T>
void shuffle(Rng& rng, std::vector<T>& v)
{
    for (std::size_t i = v.size(); i > 1; --i)
        std::swap(v[i - 1], v[uniform_below(rng, i)]);
}

} // namespace

ConcurrencyRelation random_relation(std::uint64_t seed, std::size_t place_count, double density)
{
    Rng rng(seed);
    std::vector<ConcurrencyRelation::Pair> pairs;
    for (std::uint32_t a = 1; a <= place_count; ++a) {
        for (std::uint32_t b = a + 1; b <= place_count; ++b) {
            if (coin(rng, density))
                pairs.emplace_back(a, b);
        }
    }
    return ConcurrencyRelation(place_count, std::move(pairs));
}

ConcurrencyRelation random_relation_with_pairs(std::uint64_t seed, std::size_t place_count, std::size_t pair_count)
{
    if (place_count < 2 || pair_count > place_count * (place_count - 1) / 2)
        throw Error(Errc::TooLarge, "too many pairs for " + std::to_string(place_count) + " places");
    Rng rng(seed);
    std::unordered_set<std::uint64_t> keys;
    keys.reserve(pair_count * 2);
    std::vector<ConcurrencyRelation::Pair> pairs;
    pairs.reserve(pair_count);
    while (pairs.size() < pair_count) {
        auto a = static_cast<std::uint32_t>(uniform_below(rng, place_count) + 1);
        auto b = static_cast<std::uint32_t>(uniform_below(rng, place_count) + 1);
        if (a == b)
            continue;
        if (a > b)
            std::swap(a, b);
        if (keys.insert((std::uint64_t{a} << 32) | b).second)
            pairs.emplace_back(a, b);
    }
    return ConcurrencyRelation(place_count, std::move(pairs));
}

ConcurrencyRelation planted_partition(std::uint64_t seed, std::size_t place_count, std::uint32_t colors,
                                      double density)
{
    if (colors == 0 || colors > place_count)
        throw Error(Errc::InvalidConfig, "need 1 <= colors <= places");
    Rng rng(seed);
    std::vector<std::uint32_t> cls(place_count);
    for (std::size_t v = 0; v < place_count; ++v)
        cls[v] = v < colors ? static_cast<std::uint32_t>(v) : static_cast<std::uint32_t>(uniform_below(rng, colors));
    std::vector<std::uint32_t> label(place_count);
    for (std::size_t v = 0; v < place_count; ++v)
        label[v] = static_cast<std::uint32_t>(v + 1);
    shuffle(rng, label);

    std::vector<ConcurrencyRelation::Pair> pairs;
    for (std::size_t a = 0; a < place_count; ++a) {
        for (std::size_t b = a + 1; b < place_count; ++b) {
            if (cls[a] == cls[b])
                continue;
            if ((a < colors && b < colors) || coin(rng, density))
                pairs.emplace_back(label[a], label[b]);
        }
    }
    return ConcurrencyRelation(place_count, std::move(pairs));
}

Nupn random_safe_net(std::uint64_t seed, std::size_t place_count, std::size_t transition_count)
{
    if (place_count == 0)
        throw Error(Errc::InvalidConfig, "need at least one place");
    Rng rng(seed);
    Nupn out;
    auto& net = out.net;
    for (std::size_t p = 1; p <= place_count; ++p)
        net.places.push_back("p" + std::to_string(p));

    // components of at least one place, in shuffled place order
    std::vector<std::uint32_t> order(place_count);
    for (std::size_t i = 0; i < place_count; ++i)
        order[i] = static_cast<std::uint32_t>(i + 1);
    shuffle(rng, order);
    const std::size_t components = 1 + uniform_below(rng, std::min<std::size_t>(place_count, 4));
    std::vector<std::vector<std::uint32_t>> comp(components);
    for (std::size_t i = 0; i < place_count; ++i)
        comp[i < components ? i : uniform_below(rng, components)].push_back(order[i]);

    for (std::size_t c = 0; c < components; ++c) {
        std::sort(comp[c].begin(), comp[c].end());
        std::vector<PlaceIndex> places;
        for (auto p : comp[c])
            places.emplace_back(p);
        out.units.push_back(Unit{"u" + std::to_string(c + 1), places});
        net.initial_marking.emplace_back(comp[c][uniform_below(rng, comp[c].size())]);
    }
    std::sort(net.initial_marking.begin(), net.initial_marking.end());

    std::set<std::pair<PlaceIndex, TransitionIndex>> pre;
    std::set<std::pair<TransitionIndex, PlaceIndex>> post;
    for (std::size_t t = 1; t <= transition_count; ++t) {
        net.transitions.push_back("t" + std::to_string(t));
        TransitionIndex ti{static_cast<std::uint32_t>(t)};
        std::size_t involved = components >= 2 && coin(rng, 0.3) ? 2 : 1;
        std::size_t first = uniform_below(rng, components);
        std::size_t second = (first + 1 + uniform_below(rng, std::max<std::size_t>(components - 1, 1))) % components;
        for (std::size_t k = 0; k < involved; ++k) {
            const auto& places = comp[k == 0 ? first : second];
            auto from = places[uniform_below(rng, places.size())];
            auto to = places[uniform_below(rng, places.size())];
            pre.emplace(PlaceIndex{from}, ti);
            post.emplace(ti, PlaceIndex{to});
        }
    }
    net.pre_arcs.assign(pre.begin(), pre.end());
    net.post_arcs.assign(post.begin(), post.end());
    return out;
}

PetriNet random_net(std::uint64_t seed, std::size_t place_count, std::size_t transition_count)
{
    Rng rng(seed);
    PetriNet net;
    for (std::size_t p = 1; p <= place_count; ++p) {
        net.places.push_back("p" + std::to_string(p));
        if (coin(rng, 0.25))
            net.initial_marking.emplace_back(static_cast<std::uint32_t>(p));
    }
    std::set<std::pair<PlaceIndex, TransitionIndex>> pre;
    std::set<std::pair<TransitionIndex, PlaceIndex>> post;
    for (std::size_t t = 1; t <= transition_count; ++t) {
        net.transitions.push_back("t" + std::to_string(t));
        TransitionIndex ti{static_cast<std::uint32_t>(t)};
        auto ins = 1 + uniform_below(rng, 2);
        auto outs = 1 + uniform_below(rng, 2);
        for (std::size_t k = 0; k < ins; ++k)
            pre.emplace(PlaceIndex{static_cast<std::uint32_t>(uniform_below(rng, place_count) + 1)}, ti);
        for (std::size_t k = 0; k < outs; ++k)
            post.emplace(ti, PlaceIndex{static_cast<std::uint32_t>(uniform_below(rng, place_count) + 1)});
    }
    net.pre_arcs.assign(pre.begin(), pre.end());
    net.post_arcs.assign(post.begin(), post.end());
    return net;
}

} // namespace nupnsat
