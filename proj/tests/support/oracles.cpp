#include "oracles.hpp"

#include <algorithm>
#include <cstdlib>
#include <deque>
#include <random>
#include <stdexcept>

namespace oracle {

using namespace nupnsat;

Reachable reachable_markings(const PetriNet& net)
{
    const auto np = net.place_count();
    if (np > 24)
        throw std::invalid_argument("oracle limited to 24 places");
    std::vector<Mask> pre(net.transition_count(), 0);
    std::vector<Mask> post(net.transition_count(), 0);
    for (auto [p, t] : net.pre_arcs)
        pre[t.offset()] |= Mask{1} << p.offset();
    for (auto [t, p] : net.post_arcs)
        post[t.offset()] |= Mask{1} << p.offset();
    Mask initial = 0;
    for (auto p : net.initial_marking)
        initial |= Mask{1} << p.offset();

    std::vector<bool> seen(std::size_t{1} << np, false);
    std::deque<Mask> work{initial};
    seen[initial] = true;
    Reachable out;
    while (!work.empty()) {
        Mask m = work.front();
        work.pop_front();
        for (std::size_t t = 0; t < pre.size(); ++t) {
            if ((m & pre[t]) != pre[t])
                continue;
            Mask rest = m & ~pre[t];
            if (rest & post[t]) {
                out.unsafe = true;
                return out;
            }
            Mask next = rest | post[t];
            if (!seen[next]) {
                seen[next] = true;
                work.push_back(next);
            }
        }
    }
    for (Mask m = 0; m < seen.size(); ++m) {
        if (seen[m])
            out.markings.push_back(m);
    }
    return out;
}

Mask to_mask(const Marking& m)
{
    Mask out = 0;
    for (auto p : m.places())
        out |= Mask{1} << p.offset();
    return out;
}

std::set<std::pair<std::uint32_t, std::uint32_t>> co_marked(const std::vector<Mask>& markings, std::size_t places)
{
    std::set<std::pair<std::uint32_t, std::uint32_t>> out;
    for (Mask m : markings) {
        for (std::uint32_t i = 0; i < places; ++i) {
            for (std::uint32_t j = i + 1; j < places; ++j) {
                if ((m >> i & 1) && (m >> j & 1))
                    out.emplace(i + 1, j + 1);
            }
        }
    }
    return out;
}

namespace {

bool clause_true(const Clause& c, std::uint64_t bits)
{
    for (auto l : c) {
        bool v = bits >> (std::abs(l) - 1) & 1;
        if (v == (l > 0))
            return true;
    }
    return false;
}

} // namespace

bool truth_table_sat(const CnfFormula& f)
{
    if (f.num_vars > 24)
        throw std::invalid_argument("truth table limited to 24 variables");
    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << f.num_vars); ++bits) {
        if (std::all_of(f.clauses.begin(), f.clauses.end(), [&](const Clause& c) { return clause_true(c, bits); }))
            return true;
    }
    return false;
}

namespace {

struct Counter {
    std::uint32_t vars;
    // Clauses indexed by their highest variable: checked once that variable is set.
    std::vector<std::vector<const Clause*>> closing;
    std::vector<signed char> value;

    bool ok(std::uint32_t v) const
    {
        for (const auto* c : closing[v]) {
            bool sat = false;
            for (auto l : *c) {
                if ((value[std::abs(l)] > 0) == (l > 0)) {
                    sat = true;
                    break;
                }
            }
            if (!sat)
                return false;
        }
        return true;
    }

    std::uint64_t count(std::uint32_t v)
    {
        if (v > vars)
            return 1;
        std::uint64_t total = 0;
        for (signed char b : {1, -1}) {
            value[v] = b;
            if (ok(v))
                total += count(v + 1);
        }
        value[v] = 0;
        return total;
    }
};

} // namespace

std::uint64_t count_models(const CnfFormula& f)
{
    Counter c{f.num_vars, std::vector<std::vector<const Clause*>>(f.num_vars + 1), std::vector<signed char>(f.num_vars + 1, 0)};
    for (const auto& cl : f.clauses) {
        if (cl.empty())
            return 0;
        std::uint32_t top = 0;
        for (auto l : cl)
            top = std::max(top, static_cast<std::uint32_t>(std::abs(l)));
        c.closing[top].push_back(&cl);
    }
    return c.count(1);
}

namespace {

bool color_from(const std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t k, std::vector<std::uint32_t>& col,
                std::size_t i)
{
    if (i == adj.size())
        return true;
    for (std::uint32_t c = 1; c <= k; ++c) {
        if (std::none_of(adj[i].begin(), adj[i].end(), [&](std::uint32_t q) { return col[q] == c; })) {
            col[i] = c;
            if (color_from(adj, k, col, i + 1))
                return true;
        }
    }
    col[i] = 0;
    return false;
}

} // namespace

std::optional<std::vector<std::uint32_t>> find_coloring(const ConcurrencyRelation& rel, std::uint32_t k)
{
    std::vector<std::vector<std::uint32_t>> adj(rel.place_count());
    for (auto [p, q] : rel.pairs()) {
        adj[p - 1].push_back(q - 1);
        adj[q - 1].push_back(p - 1);
    }
    std::vector<std::uint32_t> col(rel.place_count(), 0);
    if (color_from(adj, k, col, 0))
        return col;
    return std::nullopt;
}

std::uint32_t chromatic_number(const ConcurrencyRelation& rel)
{
    for (std::uint32_t k = 1;; ++k) {
        if (find_coloring(rel, k))
            return k;
    }
}

std::vector<std::uint32_t> normalize(const std::vector<std::uint32_t>& coloring)
{
    std::vector<std::uint32_t> relabel(coloring.size() + 2, 0);
    std::uint32_t next = 0;
    std::vector<std::uint32_t> out;
    for (auto c : coloring) {
        if (relabel[c] == 0)
            relabel[c] = ++next;
        out.push_back(relabel[c]);
    }
    return out;
}

Assignment witness(const std::vector<std::uint32_t>& coloring, std::uint32_t n)
{
    Assignment a(static_cast<std::uint32_t>(coloring.size()) * n);
    for (std::size_t p = 0; p < coloring.size(); ++p)
        a.set(VarId{static_cast<std::uint32_t>(p) * n + coloring[p]}, true);
    return a;
}

CnfFormula random_cnf(std::uint64_t seed, std::uint32_t vars, std::size_t clauses)
{
    std::mt19937_64 rng(seed);
    CnfFormula f;
    f.num_vars = vars;
    for (std::size_t i = 0; i < clauses; ++i) {
        std::uint32_t width = 1 + static_cast<std::uint32_t>(rng() % std::min<std::uint32_t>(3, vars));
        std::vector<std::uint32_t> pick;
        while (pick.size() < width) {
            auto v = 1 + static_cast<std::uint32_t>(rng() % vars);
            if (std::find(pick.begin(), pick.end(), v) == pick.end())
                pick.push_back(v);
        }
        Clause c;
        for (auto v : pick)
            c.push_back(rng() % 2 ? static_cast<Literal>(v) : -static_cast<Literal>(v));
        f.clauses.push_back(std::move(c));
    }
    return f;
}

} // namespace oracle
