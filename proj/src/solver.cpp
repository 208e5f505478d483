#include "nupnsat/solver.hpp"

#include "nupnsat/error.hpp"

#include <algorithm>
#include <cstdlib>

namespace nupnsat {

std::string_view to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::Sat: return "SAT";
    case SolveStatus::Unsat: return "UNSAT";
    case SolveStatus::Unknown: return "UNKNOWN";
    }
    return "UNKNOWN";
}

namespace {

using Clock = std::chrono::steady_clock;

class Dpll {
public:
    Dpll(const CnfFormula& f, const Budget& budget) : f_(f), budget_(budget), value_(f.num_vars + 1, 0)
    {
        watches_.resize(2 * (std::size_t{f.num_vars} + 1));
        occurs_.resize(2 * (std::size_t{f.num_vars} + 1));
        starts_.reserve(f.clauses.size() + 1);
        for (const auto& c : f.clauses) {
            for (auto l : c)
                occurs_[watch_index(l)].push_back(static_cast<std::uint32_t>(starts_.size()));
            starts_.push_back(lits_.size());
            lits_.insert(lits_.end(), c.begin(), c.end());
        }
        starts_.push_back(lits_.size());
    }

    SolveOutcome run()
    {
        start_ = Clock::now();
        SolveOutcome out;
        out.status = search(out.reason);
        out.stats = stats_;
        out.stats.seconds = std::chrono::duration<double>(Clock::now() - start_).count();
        if (out.status == SolveStatus::Sat) {
            out.model = Assignment(f_.num_vars);
            for (std::uint32_t v = 1; v <= f_.num_vars; ++v)
                out.model.set(VarId{v}, value_[v] > 0);
            if (!satisfies(f_, out.model))
                throw std::logic_error("dpll produced a non-model");
        }
        return out;
    }

private:
    static std::size_t watch_index(Literal l) { return 2 * static_cast<std::size_t>(std::abs(l)) + (l < 0); }

    int lit_value(Literal l) const
    {
        int v = value_[static_cast<std::size_t>(std::abs(l))];
        return l > 0 ? v : -v;
    }

    void assign(Literal l)
    {
        value_[static_cast<std::size_t>(std::abs(l))] = l > 0 ? 1 : -1;
        trail_.push_back(l);
    }

    /// Installs watches and enqueues unit clauses. False on an immediate conflict.
    bool attach()
    {
        for (std::size_t c = 0; c + 1 < starts_.size(); ++c) {
            auto size = starts_[c + 1] - starts_[c];
            Literal first = lits_[starts_[c]];
            if (size == 0)
                return false;
            if (size == 1) {
                int v = lit_value(first);
                if (v < 0)
                    return false;
                if (v == 0)
                    assign(first);
                continue;
            }
            watches_[watch_index(first)].push_back(static_cast<std::uint32_t>(c));
            watches_[watch_index(lits_[starts_[c] + 1])].push_back(static_cast<std::uint32_t>(c));
        }
        return true;
    }

    bool propagate()
    {
        while (qhead_ < trail_.size()) {
            const Literal falsified = -trail_[qhead_++];
            auto& ws = watches_[watch_index(falsified)];
            std::size_t keep = 0;
            bool conflict = false;
            for (std::size_t i = 0; i < ws.size(); ++i) {
                auto c = ws[i];
                if (conflict) {
                    ws[keep++] = c;
                    continue;
                }
                Literal* lits = lits_.data() + starts_[c];
                const std::size_t size = starts_[c + 1] - starts_[c];
                if (lits[0] == falsified)
                    std::swap(lits[0], lits[1]);
                if (lit_value(lits[0]) > 0) {
                    ws[keep++] = c;
                    continue;
                }
                bool moved = false;
                for (std::size_t k = 2; k < size; ++k) {
                    if (lit_value(lits[k]) >= 0) {
                        std::swap(lits[1], lits[k]);
                        watches_[watch_index(lits[1])].push_back(c);
                        moved = true;
                        break;
                    }
                }
                if (moved)
                    continue;
                ws[keep++] = c;
                if (lit_value(lits[0]) < 0) {
                    conflict = true;
                } else {
                    assign(lits[0]);
                    ++stats_.propagations;
                }
            }
            ws.resize(keep);
            if (conflict)
                return false;
        }
        return true;
    }

    void undo_to(std::size_t trail_size)
    {
        while (trail_.size() > trail_size) {
            auto v = static_cast<std::uint32_t>(std::abs(trail_.back()));
            value_[v] = 0;
            cursor_ = std::min(cursor_, v);
            trail_.pop_back();
        }
        qhead_ = std::min(qhead_, trail_.size());
    }

    bool clause_satisfied(std::uint32_t c) const
    {
        for (auto i = starts_[c]; i < starts_[c + 1]; ++i) {
            if (lit_value(lits_[i]) > 0)
                return true;
        }
        return false;
    }

    /// True if every clause containing `l` is already satisfied, so that
    /// assigning -l cannot falsify anything.
    bool occurrences_satisfied(Literal l) const
    {
        const auto& occ = occurs_[watch_index(l)];
        return std::all_of(occ.begin(), occ.end(), [&](std::uint32_t c) { return clause_satisfied(c); });
    }

    /// Flips the most recent unflipped decision. False when none is left.
    bool backtrack()
    {
        while (!levels_.empty()) {
            auto level = levels_.back();
            levels_.pop_back();
            Literal decision = trail_[level.trail_start];
            undo_to(level.trail_start);
            qhead_ = trail_.size();
            if (!level.flipped) {
                levels_.push_back({trail_.size(), true});
                assign(-decision);
                return true;
            }
        }
        return false;
    }

    SolveStatus search(std::string& reason)
    {
        if (!attach())
            return SolveStatus::Unsat;
        while (true) {
            if (!propagate()) {
                if (!backtrack())
                    return SolveStatus::Unsat;
                continue;
            }
            while (cursor_ <= f_.num_vars && value_[cursor_] != 0)
                ++cursor_;
            if (cursor_ > f_.num_vars)
                return SolveStatus::Sat;

            if (stats_.decisions >= budget_.max_decisions) {
                reason = "decision budget of " + std::to_string(budget_.max_decisions) + " exhausted";
                return SolveStatus::Unknown;
            }
            if ((stats_.decisions & 1023u) == 0 && Clock::now() - start_ > budget_.max_seconds) {
                reason = "time budget exhausted";
                return SolveStatus::Unknown;
            }
            // Pure literal rule on the branching variable: if one polarity only
            // occurs in satisfied clauses, the other is forced at this level.
            const auto var = static_cast<Literal>(cursor_);
            const bool occurs = !occurs_[watch_index(var)].empty() || !occurs_[watch_index(-var)].empty();
            if (occurs && occurrences_satisfied(var)) {
                assign(-var);
                ++stats_.pure_literals;
                continue;
            }
            if (occurs && occurrences_satisfied(-var)) {
                assign(var);
                ++stats_.pure_literals;
                continue;
            }
            ++stats_.decisions;
            levels_.push_back({trail_.size(), false});
            assign(var);
        }
    }

    struct Level {
        std::size_t trail_start;
        bool flipped;
    };

    const CnfFormula& f_;
    Budget budget_;
    std::vector<Literal> lits_;
    std::vector<std::size_t> starts_;
    std::vector<std::vector<std::uint32_t>> watches_;
    std::vector<std::vector<std::uint32_t>> occurs_;
    std::vector<int> value_; // 0 unassigned, 1 true, -1 false
    std::vector<Literal> trail_;
    std::vector<Level> levels_;
    std::size_t qhead_ = 0;
    std::uint32_t cursor_ = 1;
    SolveStats stats_;
    Clock::time_point start_;
};

} // namespace

SolveOutcome dpll_solve(const CnfFormula& f, const Budget& budget)
{
    if (budget.max_decisions == 0 || budget.max_seconds.count() <= 0)
        throw Error(Errc::InvalidConfig, "solver budget must be positive");
    if (auto problem = check_formula(f); !problem.empty())
        throw Error(Errc::MalformedCnf, problem);
    return Dpll(f, budget).run();
}

namespace {

/// Backtracking over colorings in first-occurrence normal form: place i may
/// only use colors 1..(max color so far)+1. Every proper coloring has exactly
/// one such normal form, so this visits each candidate partition once.
bool colorable(const std::vector<std::vector<std::uint32_t>>& adj, std::uint32_t k, std::vector<std::uint32_t>& color,
               std::uint32_t place, std::uint32_t used)
{
    if (place == adj.size())
        return true;
    for (std::uint32_t c = 1; c <= std::min(k, used + 1); ++c) {
        bool clash = false;
        for (auto q : adj[place]) {
            if (q < place && color[q] == c) {
                clash = true;
                break;
            }
        }
        if (clash)
            continue;
        color[place] = c;
        if (colorable(adj, k, color, place + 1, std::max(used, c)))
            return true;
    }
    color[place] = 0;
    return false;
}

} // namespace

std::uint32_t brute_force_chromatic(const ConcurrencyRelation& rel)
{
    if (rel.place_count() > brute_force_max_places)
        throw Error(Errc::TooLarge, std::to_string(rel.place_count()) + " places exceed the brute-force limit of "
                                        + std::to_string(brute_force_max_places));
    auto adj = rel.adjacency();
    std::vector<std::uint32_t> color(rel.place_count(), 0);
    for (std::uint32_t k = 1;; ++k) {
        if (colorable(adj, k, color, 0, 0))
            return k;
    }
}

Coloring greedy_coloring(const ConcurrencyRelation& rel, std::span<const PlaceIndex> order)
{
    const auto np = rel.place_count();
    std::vector<bool> seen(np, false);
    for (auto p : order) {
        if (p.value < 1 || p.value > np || seen[p.offset()])
            throw Error(Errc::IndexOutOfRange, "order is not a permutation of the places");
        seen[p.offset()] = true;
    }
    if (order.size() != np)
        throw Error(Errc::IndexOutOfRange, "order is not a permutation of the places");

    auto adj = rel.adjacency();
    std::vector<std::uint32_t> color(np, 0);
    std::vector<std::uint32_t> stamp(np + 2, 0);
    std::uint32_t colors = 1;
    std::uint32_t round = 0;
    for (auto p : order) {
        ++round;
        for (auto q : adj[p.offset()]) {
            if (color[q] != 0)
                stamp[color[q]] = round;
        }
        std::uint32_t c = 1;
        while (stamp[c] == round)
            ++c;
        color[p.offset()] = c;
        colors = std::max(colors, c);
    }
    return Coloring{colors, UnitAssignment(UnitCount(colors), std::move(color))};
}

Coloring greedy_coloring(const ConcurrencyRelation& rel)
{
    std::vector<PlaceIndex> order;
    order.reserve(rel.place_count());
    for (std::uint32_t p = 1; p <= rel.place_count(); ++p)
        order.emplace_back(p);
    return greedy_coloring(rel, order);
}

} // namespace nupnsat
