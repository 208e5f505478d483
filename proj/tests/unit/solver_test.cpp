#include "nupnsat/bench.hpp"
#include "nupnsat/generate.hpp"
#include "nupnsat/solver.hpp"

#include "check.hpp"
#include "oracles.hpp"

#include <numeric>

using namespace nupnsat;

namespace {

ConcurrencyRelation complete(std::size_t k)
{
    std::vector<ConcurrencyRelation::Pair> pairs;
    for (std::uint32_t i = 1; i <= k; ++i) {
        for (std::uint32_t j = i + 1; j <= k; ++j)
            pairs.emplace_back(i, j);
    }
    return ConcurrencyRelation(k, pairs);
}

ConcurrencyRelation c5() { return ConcurrencyRelation(5, {{1, 2}, {2, 3}, {3, 4}, {4, 5}, {1, 5}}); }

CnfFormula formula(std::uint32_t vars, std::vector<Clause> clauses)
{
    CnfFormula f;
    f.num_vars = vars;
    f.clauses = std::move(clauses);
    return f;
}

} // namespace

TEST_SUITE("solver")
{
    TEST_CASE("examples")
    {
        CHECK(dpll_solve(formula(1, {{1}, {-1}})).status == SolveStatus::Unsat);

        auto free = dpll_solve(formula(1, {}));
        REQUIRE(free.status == SolveStatus::Sat);
        CHECK(free.model.value(VarId{1}));

        auto sat = dpll_solve(encode(c5(), UnitCount(3)));
        REQUIRE(sat.status == SolveStatus::Sat);
        CHECK(verify_partition(decode(sat.model, 5, UnitCount(3)), c5()).empty());
        CHECK(dpll_solve(encode(c5(), UnitCount(2))).status == SolveStatus::Unsat);
    }

    TEST_CASE("zero-variable formula")
    {
        CHECK(dpll_solve(formula(0, {})).status == SolveStatus::Sat);
    }

    TEST_CASE("branching is deterministic")
    {
        auto f = encode(random_relation(3, 14, 0.4), UnitCount(4));
        auto a = dpll_solve(f);
        auto b = dpll_solve(f);
        CHECK(a.status == b.status);
        CHECK(a.model == b.model);
        CHECK(a.stats.decisions == b.stats.decisions);
        CHECK(a.stats.propagations == b.stats.propagations);
    }

    TEST_CASE("agrees with the truth table")
    {
        for (std::uint64_t seed = 1; seed <= 400; ++seed) {
            CAPTURE(seed);
            auto vars = 1 + static_cast<std::uint32_t>(seed % 20);
            auto f = oracle::random_cnf(seed, vars, static_cast<std::size_t>(vars * (2 + seed % 4)));
            auto out = dpll_solve(f);
            REQUIRE(out.status != SolveStatus::Unknown);
            CHECK((out.status == SolveStatus::Sat) == oracle::truth_table_sat(f));
            if (out.status == SolveStatus::Sat)
                CHECK(satisfies(f, out.model));
        }
    }

    TEST_CASE("budget exhaustion is Unknown")
    {
        auto f = encode(planted_partition(1, 20, 5, 0.5), UnitCount(4));
        REQUIRE(dpll_solve(f).stats.decisions > 3);
        auto out = dpll_solve(f, Budget{3, std::chrono::duration<double>(60)});
        CHECK(out.status == SolveStatus::Unknown);
        CHECK(out.reason.find("decision") != std::string::npos);
        CHECK(out.stats.decisions == 3);
    }

    TEST_CASE("invalid input")
    {
        CHECK_ERRC(dpll_solve(formula(1, {{1}}), Budget{0, std::chrono::duration<double>(1)}), Errc::InvalidConfig);
        CHECK_ERRC(dpll_solve(formula(1, {{1}}), Budget{1, std::chrono::duration<double>(0)}), Errc::InvalidConfig);
        CHECK_ERRC(dpll_solve(formula(1, {{2}})), Errc::MalformedCnf);
        CHECK_ERRC(dpll_solve(formula(1, {{}})), Errc::MalformedCnf);
    }

    TEST_CASE("brute-force chromatic number")
    {
        CHECK(brute_force_chromatic(ConcurrencyRelation(4, {})) == 1);
        CHECK(brute_force_chromatic(complete(4)) == 4);
        CHECK(brute_force_chromatic(c5()) == 3);
        CHECK(brute_force_chromatic(ConcurrencyRelation(0, {})) == 1);
        CHECK(brute_force_chromatic(complete(12)) == 12);
        CHECK_ERRC(brute_force_chromatic(ConcurrencyRelation(13, {})), Errc::TooLarge);
        for (std::uint64_t seed = 1; seed <= 80; ++seed) {
            auto rel = random_relation(seed, 1 + seed % 12, 0.05 * static_cast<double>(seed % 19));
            CHECK(brute_force_chromatic(rel) == oracle::chromatic_number(rel));
        }
    }

    TEST_CASE("smallest satisfiable n equals the chromatic number")
    {
        for (std::uint64_t seed = 1; seed <= 60; ++seed) {
            auto rel = random_relation(seed, 1 + seed % 10, 0.6);
            std::uint32_t n = 1;
            while (dpll_solve(encode(rel, UnitCount(n))).status != SolveStatus::Sat)
                ++n;
            CHECK(n == brute_force_chromatic(rel));
        }
    }

    TEST_CASE("greedy coloring")
    {
        CHECK(greedy_coloring(ConcurrencyRelation(3, {})).colors == 1);
        CHECK(greedy_coloring(complete(4)).colors == 4);
        std::vector<PlaceIndex> reversed{PlaceIndex{4}, PlaceIndex{3}, PlaceIndex{2}, PlaceIndex{1}};
        CHECK(greedy_coloring(complete(4), reversed).colors == 4);

        auto c = greedy_coloring(c5());
        CHECK(c.colors == 3);
        CHECK(std::vector(c.assignment.units_by_place().begin(), c.assignment.units_by_place().end())
              == std::vector<std::uint32_t>{1, 2, 1, 2, 3});

        std::vector<PlaceIndex> short_order{PlaceIndex{1}};
        CHECK_ERRC(greedy_coloring(c5(), short_order), Errc::IndexOutOfRange);
        std::vector<PlaceIndex> repeated{PlaceIndex{1}, PlaceIndex{1}, PlaceIndex{2}, PlaceIndex{3}, PlaceIndex{4}};
        CHECK_ERRC(greedy_coloring(c5(), repeated), Errc::IndexOutOfRange);
    }

    TEST_CASE("greedy coloring is proper and an upper bound")
    {
        for (std::uint64_t seed = 1; seed <= 80; ++seed) {
            auto rel = random_relation(seed, 1 + seed % 12, 0.5);
            std::vector<PlaceIndex> order;
            for (std::uint32_t p = 1; p <= rel.place_count(); ++p)
                order.emplace_back(p);
            Rng rng(seed);
            std::shuffle(order.begin(), order.end(), rng);
            auto c = greedy_coloring(rel, order);
            CHECK(verify_partition(c.assignment, rel).empty());
            CHECK(c.colors >= brute_force_chromatic(rel));
        }
    }
}
