#include "nupnsat/reachability.hpp"

#include "text_util.hpp"

#include <algorithm>
#include <bit>
#include <ostream>
#include <unordered_set>

namespace nupnsat {

namespace {

constexpr std::size_t word_count(std::size_t places) { return (places + 63) / 64; }

std::uint64_t fnv1a(std::uint64_t h, std::uint64_t v)
{
    for (int i = 0; i < 8; ++i) {
        h ^= (v >> (8 * i)) & 0xffu;
        h *= 0x100000001b3ull;
    }
    return h;
}

} // namespace

Marking::Marking(std::size_t place_count) : place_count_(place_count), words_(word_count(place_count), 0) {}

Marking::Marking(std::size_t place_count, std::span<const PlaceIndex> marked) : Marking(place_count)
{
    for (auto p : marked)
        insert(p);
}

bool Marking::contains(PlaceIndex p) const
{
    auto i = p.offset();
    return i < place_count_ && ((words_[i / 64] >> (i % 64)) & 1u);
}

void Marking::insert(PlaceIndex p)
{
    auto i = p.offset();
    if (i >= place_count_)
        throw Error(Errc::IndexOutOfRange, "place " + std::to_string(p.value));
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
}

void Marking::erase(PlaceIndex p)
{
    auto i = p.offset();
    if (i < place_count_)
        words_[i / 64] &= ~(std::uint64_t{1} << (i % 64));
}

std::size_t Marking::size() const
{
    std::size_t n = 0;
    for (auto w : words_)
        n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

std::vector<PlaceIndex> Marking::places() const
{
    std::vector<PlaceIndex> out;
    for (std::size_t w = 0; w < words_.size(); ++w) {
        for (auto bits = words_[w]; bits != 0; bits &= bits - 1)
            out.emplace_back(static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits) + 1));
    }
    return out;
}

UnsafeNetError::UnsafeNetError(std::vector<TransitionIndex> trace, PlaceIndex place, std::string message)
    : Error(Errc::UnsafeNet, std::move(message)), trace_(std::move(trace)), place_(place)
{
}

namespace {

/// Markings packed back to back in one buffer; a marking is identified by its
/// ordinal.
class MarkingStore {
public:
    explicit MarkingStore(std::size_t words) : words_(words) {}

    std::size_t size() const { return count_; }
    const std::uint64_t* at(std::size_t i) const { return data_.data() + i * words_; }

    std::uint64_t hash(std::size_t i) const
    {
        std::uint64_t h = 0xcbf29ce484222325ull;
        for (std::size_t w = 0; w < words_; ++w)
            h = fnv1a(h, at(i)[w]);
        return h;
    }

    bool equal(std::size_t a, std::size_t b) const { return std::equal(at(a), at(a) + words_, at(b)); }

    std::size_t push(const std::vector<std::uint64_t>& m)
    {
        data_.insert(data_.end(), m.begin(), m.end());
        return count_++;
    }

    void pop()
    {
        data_.resize(data_.size() - words_);
        --count_;
    }

private:
    std::size_t words_;
    std::size_t count_ = 0;
    std::vector<std::uint64_t> data_;
};

struct TransitionMasks {
    std::vector<std::uint64_t> pre;
    std::vector<std::uint64_t> post;
};

} // namespace

std::vector<Marking> explore(const PetriNet& net, const ExploreLimits& limits)
{
    if (limits.max_markings == 0 || limits.max_seconds.count() <= 0)
        throw Error(Errc::InvalidConfig, "exploration limits must be positive");
    if (auto diags = validate(net); has_errors(diags)) {
        const auto& first = *std::find_if(diags.begin(), diags.end(),
                                          [](const Diagnostic& d) { return d.severity == Severity::Error; });
        throw Error(Errc::Syntax, "invalid net: " + std::string(to_string(first.kind)) + " " + first.subject);
    }

    const auto start = std::chrono::steady_clock::now();
    const std::size_t np = net.place_count();
    const std::size_t nw = word_count(np);

    std::vector<TransitionMasks> masks(net.transition_count(), {std::vector<std::uint64_t>(nw, 0),
                                                                std::vector<std::uint64_t>(nw, 0)});
    for (auto [p, t] : net.pre_arcs)
        masks[t.offset()].pre[p.offset() / 64] |= std::uint64_t{1} << (p.offset() % 64);
    for (auto [t, p] : net.post_arcs)
        masks[t.offset()].post[p.offset() / 64] |= std::uint64_t{1} << (p.offset() % 64);

    MarkingStore store(nw);
    auto hasher = [&](std::size_t i) { return store.hash(i); };
    auto eq = [&](std::size_t a, std::size_t b) { return store.equal(a, b); };
    std::unordered_set<std::size_t, decltype(hasher), decltype(eq)> seen(1024, hasher, eq);

    // parent links for trace reconstruction
    std::vector<std::pair<std::size_t, std::uint32_t>> parent;

    std::vector<std::uint64_t> cur(nw, 0);
    for (auto p : net.initial_marking)
        cur[p.offset() / 64] |= std::uint64_t{1} << (p.offset() % 64);
    seen.insert(store.push(cur));
    parent.emplace_back(0, 0);

    auto trace_to = [&](std::size_t m) {
        std::vector<TransitionIndex> trace;
        while (m != 0) {
            trace.emplace_back(parent[m].second);
            m = parent[m].first;
        }
        std::reverse(trace.begin(), trace.end());
        return trace;
    };

    std::vector<std::uint64_t> next(nw);
    for (std::size_t head = 0; head < store.size(); ++head) {
        if ((head & 255u) == 0 && std::chrono::steady_clock::now() - start > limits.max_seconds)
            throw Error(Errc::LimitExceeded, "time limit reached after " + std::to_string(store.size()) + " markings");
        std::copy(store.at(head), store.at(head) + nw, cur.begin());

        for (std::size_t t = 0; t < masks.size(); ++t) {
            const auto& m = masks[t];
            bool enabled = true;
            for (std::size_t w = 0; w < nw && enabled; ++w)
                enabled = (cur[w] & m.pre[w]) == m.pre[w];
            if (!enabled)
                continue;

            for (std::size_t w = 0; w < nw; ++w) {
                auto kept = cur[w] & ~m.pre[w];
                if (auto clash = kept & m.post[w]; clash != 0) {
                    auto trace = trace_to(head);
                    trace.emplace_back(static_cast<std::uint32_t>(t + 1));
                    PlaceIndex place{static_cast<std::uint32_t>(w * 64 + std::countr_zero(clash) + 1)};
                    throw UnsafeNetError(std::move(trace), place,
                                         "firing " + net.transitions[t] + " puts a second token on "
                                             + net.places[place.offset()]);
                }
                next[w] = kept | m.post[w];
            }

            auto id = store.push(next);
            if (seen.insert(id).second) {
                parent.emplace_back(head, static_cast<std::uint32_t>(t + 1));
                if (store.size() > limits.max_markings)
                    throw Error(Errc::LimitExceeded, "more than " + std::to_string(limits.max_markings) + " markings");
            } else {
                store.pop();
            }
        }
    }

    std::vector<Marking> out;
    out.reserve(store.size());
    for (std::size_t i = 0; i < store.size(); ++i) {
        Marking mk(np);
        for (std::size_t w = 0; w < nw; ++w) {
            for (auto bits = store.at(i)[w]; bits != 0; bits &= bits - 1)
                mk.insert(PlaceIndex{static_cast<std::uint32_t>(w * 64 + std::countr_zero(bits) + 1)});
        }
        out.push_back(std::move(mk));
    }
    return out;
}

ConcurrencyRelation::ConcurrencyRelation(std::size_t place_count, std::vector<Pair> pairs)
    : place_count_(place_count), pairs_(std::move(pairs))
{
    for (auto& [a, b] : pairs_) {
        if (a == b)
            throw Error(Errc::ReflexivePair, "place " + std::to_string(a) + " paired with itself");
        if (a < 1 || b < 1 || a > place_count_ || b > place_count_)
            throw Error(Errc::IndexOutOfRange, "pair " + std::to_string(a) + " " + std::to_string(b) + " outside 1.." + std::to_string(place_count_));
        if (a > b)
            std::swap(a, b);
    }
    std::sort(pairs_.begin(), pairs_.end());
    if (auto dup = std::adjacent_find(pairs_.begin(), pairs_.end()); dup != pairs_.end())
        throw Error(Errc::DuplicatePair, "pair " + std::to_string(dup->first) + " " + std::to_string(dup->second) + " listed twice");
}

bool ConcurrencyRelation::contains(PlaceIndex a, PlaceIndex b) const
{
    Pair key = a.value < b.value ? Pair{a.value, b.value} : Pair{b.value, a.value};
    return std::binary_search(pairs_.begin(), pairs_.end(), key);
}

std::vector<std::vector<std::uint32_t>> ConcurrencyRelation::adjacency() const
{
    std::vector<std::vector<std::uint32_t>> adj(place_count_);
    for (auto [a, b] : pairs_) {
        adj[a - 1].push_back(b - 1);
        adj[b - 1].push_back(a - 1);
    }
    return adj;
}

std::uint64_t ConcurrencyRelation::hash() const
{
    std::uint64_t h = fnv1a(0xcbf29ce484222325ull, place_count_);
    for (auto [a, b] : pairs_)
        h = fnv1a(h, (std::uint64_t{a} << 32) | b);
    return h;
}

ConcurrencyRelation concurrency_relation(std::span<const Marking> markings, std::size_t place_count)
{
    std::unordered_set<std::uint64_t> keys;
    std::vector<PlaceIndex> marked;
    for (const auto& m : markings) {
        marked = m.places();
        for (std::size_t i = 0; i < marked.size(); ++i) {
            for (std::size_t j = i + 1; j < marked.size(); ++j)
                keys.insert((std::uint64_t{marked[i].value} << 32) | marked[j].value);
        }
    }
    std::vector<ConcurrencyRelation::Pair> pairs;
    pairs.reserve(keys.size());
    for (auto k : keys)
        pairs.emplace_back(static_cast<std::uint32_t>(k >> 32), static_cast<std::uint32_t>(k & 0xffffffffu));
    return ConcurrencyRelation(place_count, std::move(pairs));
}

void emit_relation(const ConcurrencyRelation& rel, std::ostream& out)
{
    out << "places " << rel.place_count() << '\n';
    for (auto [a, b] : rel.pairs())
        out << a << ' ' << b << '\n';
}

ConcurrencyRelation parse_relation(std::string_view text)
{
    bool have_header = false;
    std::size_t places = 0;
    std::vector<ConcurrencyRelation::Pair> pairs;
    std::unordered_set<std::uint64_t> seen;
    detail::for_each_line(text, '#', [&](std::size_t line, const std::vector<std::string_view>& tok) {
        if (!have_header) {
            if (tok.size() != 2 || tok[0] != "places" || !detail::parse_int(tok[1], places))
                throw Error(Errc::Syntax, "expected header: places <k>", line);
            have_header = true;
            return;
        }
        std::uint32_t a = 0;
        std::uint32_t b = 0;
        if (tok.size() != 2 || !detail::parse_int(tok[0], a) || !detail::parse_int(tok[1], b))
            throw Error(Errc::Syntax, "expected: <i> <j>", line);
        if (a == b)
            throw Error(Errc::ReflexivePair, "place " + std::to_string(a) + " paired with itself", line);
        if (a < 1 || b < 1 || a > places || b > places)
            throw Error(Errc::IndexOutOfRange, "pair " + std::to_string(a) + " " + std::to_string(b) + " outside 1.." + std::to_string(places), line);
        if (a > b)
            std::swap(a, b);
        if (!seen.insert((std::uint64_t{a} << 32) | b).second)
            throw Error(Errc::DuplicatePair, "pair " + std::to_string(a) + " " + std::to_string(b) + " listed twice", line);
        pairs.emplace_back(a, b);
    });
    if (!have_header)
        throw Error(Errc::Syntax, "missing header: places <k>");
    return ConcurrencyRelation(places, std::move(pairs));
}

std::vector<UnitSafetyViolation> check_unit_safety(const Nupn& nupn, std::span<const Marking> markings)
{
    std::vector<UnitSafetyViolation> out;
    for (std::size_t m = 0; m < markings.size(); ++m) {
        for (std::size_t u = 0; u < nupn.units.size(); ++u) {
            std::vector<PlaceIndex> marked;
            for (auto p : nupn.units[u].places) {
                if (markings[m].contains(p))
                    marked.push_back(p);
            }
            if (marked.size() > 1)
                out.push_back({m, u, std::move(marked)});
        }
    }
    return out;
}

} // namespace nupnsat
