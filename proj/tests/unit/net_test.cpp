#include "nupnsat/generate.hpp"
#include "nupnsat/net.hpp"

#include "check.hpp"

#include <algorithm>
#include <set>
#include <sstream>

using namespace nupnsat;

namespace {

PlaceIndex P(std::uint32_t i) { return PlaceIndex{i}; }
TransitionIndex T(std::uint32_t i) { return TransitionIndex{i}; }

std::string emitted(const PetriNet& net)
{
    std::ostringstream ss;
    emit_net(net, ss);
    return ss.str();
}

} // namespace

TEST_SUITE("net")
{
    TEST_CASE("smallest sequence net")
    {
        auto net = parse_net("place p0 initial\nplace p1\ntrans t0\nin p0 t0\nout t0 p1");
        CHECK(net.places == std::vector<std::string>{"p0", "p1"});
        CHECK(net.transitions == std::vector<std::string>{"t0"});
        CHECK(net.initial_marking == std::vector{P(1)});
        CHECK(net.pre_arcs == std::vector{std::pair{P(1), T(1)}});
        CHECK(net.post_arcs == std::vector{std::pair{T(1), P(2)}});
    }

    TEST_CASE("duplicate place name")
    {
        try {
            parse_net("place p\nplace p");
            FAIL("no error");
        } catch (const Error& e) {
            CHECK(e.code() == Errc::DuplicateName);
            CHECK(e.message().find("p") != std::string::npos);
            CHECK(e.line() == 2);
        }
    }

    TEST_CASE("duplicate arc is not ordinary")
    {
        CHECK_ERRC(parse_net("place p0 initial\ntrans t\nin p0 t\nin p0 t"), Errc::NonOrdinary);
        CHECK_ERRC(parse_net("place p0 initial\ntrans t\nout t p0\nout t p0"), Errc::NonOrdinary);
    }

    TEST_CASE("syntax errors carry the line")
    {
        for (const char* text : {"place", "place a b c", "trans", "in a", "out t", "frobnicate x", "place a\nplace b!"}) {
            CAPTURE(text);
            CHECK_ERRC(parse_net(text), Errc::Syntax);
        }
        try {
            parse_net("place a\n\n# c\nplace b extra");
            FAIL("no error");
        } catch (const Error& e) {
            CHECK(e.line() == 4);
        }
    }

    TEST_CASE("arcs must name declared nodes of the right kind")
    {
        CHECK_ERRC(parse_net("place p\ntrans t\nin p u"), Errc::UndeclaredNode);
        CHECK_ERRC(parse_net("place p\ntrans t\nin q t"), Errc::UndeclaredNode);
        CHECK_ERRC(parse_net("place p\ntrans t\nin t p"), Errc::UndeclaredNode);
        CHECK_ERRC(parse_net("place p\ntrans t\nout p t"), Errc::UndeclaredNode);
        CHECK_ERRC(parse_net("place p\ntrans p"), Errc::DuplicateName);
    }

    TEST_CASE("comments, blank lines and CRLF")
    {
        auto net = parse_net("# header\r\nplace a initial  # trailing\r\n\r\nplace b\r\ntrans t\r\nin a t\r\nout t b\r\n");
        CHECK(net.places == std::vector<std::string>{"a", "b"});
        CHECK(net.pre_arcs.size() == 1);
    }

    TEST_CASE("place index follows declaration order")
    {
        auto net = parse_net("trans t\nplace z\nin z t\nplace a\nout t a\nplace m initial");
        CHECK(net.places == std::vector<std::string>{"z", "a", "m"});
        CHECK(net.initial_marking == std::vector{P(3)});
        CHECK(net.pre_arcs == std::vector{std::pair{P(1), T(1)}});
        CHECK(net.post_arcs == std::vector{std::pair{T(1), P(2)}});
    }

    TEST_CASE("two singleton units")
    {
        auto n = parse_nupn("place p0 initial\nplace p1\ntrans t\nin p0 t\nout t p1\nunit u0 p0\nunit u1 p1");
        REQUIRE(n.units.size() == 2);
        CHECK(n.units[0] == Unit{"u0", {P(1)}});
        CHECK(n.units[1] == Unit{"u1", {P(2)}});
        CHECK_FALSE(n.root_unit);
    }

    TEST_CASE("unit errors")
    {
        const std::string net2 = "place p0 initial\nplace p1\n";
        CHECK_ERRC(parse_nupn(net2 + "unit u0 p0 p1\nunit u1 p1"), Errc::OverlappingUnits);
        CHECK_ERRC(parse_nupn("place p0\nplace p1\nplace p2\nunit u0 p0 p1"), Errc::UncoveredPlace);
        CHECK_ERRC(parse_nupn(net2 + "unit u0 p0\nunit u1 p1 u0"), Errc::NestedUnit);
        CHECK_ERRC(parse_nupn(net2 + "unit u0\nunit u1 p0 p1"), Errc::Syntax);
        CHECK_ERRC(parse_nupn(net2 + "unit u0 p0 p0\nunit u1 p1"), Errc::OverlappingUnits);
        CHECK_ERRC(parse_nupn(net2 + "unit u0 p0\nunit u0 p1"), Errc::DuplicateName);
        // units are not part of the plain format
        CHECK_ERRC(parse_net(net2 + "unit u0 p0 p1"), Errc::Syntax);
    }

    TEST_CASE("uncovered place is named")
    {
        try {
            parse_nupn("place p0\nplace p1\nplace p2\nunit u0 p0 p1");
            FAIL("no error");
        } catch (const Error& e) {
            CHECK(e.message().find("p2") != std::string::npos);
        }
    }

    TEST_CASE("root unit")
    {
        auto n = parse_nupn("place a\nroot u\nunit u a");
        CHECK(n.root_unit == "u");
        CHECK_ERRC(parse_nupn("place a\nroot u\nroot u\nunit u a"), Errc::Syntax);
        CHECK_ERRC(parse_nupn("place a\nroot v\nunit u a"), Errc::UndeclaredNode);
    }

    TEST_CASE("validate")
    {
        auto seq = parse_net("place p0 initial\nplace p1\ntrans t0\nin p0 t0\nout t0 p1");
        CHECK(validate(seq).empty());

        auto isolated = parse_net("place p0 initial\nplace p1\ntrans t0\ntrans t1\nin p0 t0\nout t0 p1");
        auto d = validate(isolated);
        REQUIRE(d.size() == 1);
        CHECK(d[0] == Diagnostic{Severity::Warning, DiagnosticKind::IsolatedTransition, "t1"});
        CHECK_FALSE(has_errors(d));

        auto unmarked = parse_net("place p0\nplace p1\ntrans t0\nin p0 t0\nout t0 p1");
        CHECK(validate(unmarked) == std::vector{Diagnostic{Severity::Warning, DiagnosticKind::EmptyMarking, ""}});

        auto lonely = parse_net("place p0 initial\nplace p1\nplace q\ntrans t0\nin p0 t0\nout t0 p1");
        CHECK(validate(lonely) == std::vector{Diagnostic{Severity::Warning, DiagnosticKind::IsolatedPlace, "q"}});

        auto source = parse_net("place p initial\ntrans t\nout t p");
        CHECK(validate(source) == std::vector{Diagnostic{Severity::Warning, DiagnosticKind::SourceTransition, "t"}});
    }

    TEST_CASE("validate catches hand-built errors")
    {
        PetriNet net;
        net.places = {"a", "a"};
        net.transitions = {"t"};
        net.pre_arcs = {{P(1), T(1)}, {P(3), T(1)}};
        net.post_arcs = {{T(1), P(2)}, {T(1), P(2)}};
        net.initial_marking = {P(1), P(5)};
        auto d = validate(net);
        CHECK(has_errors(d));
        auto has = [&](DiagnosticKind k) {
            return std::any_of(d.begin(), d.end(), [&](const Diagnostic& x) { return x.kind == k && x.severity == Severity::Error; });
        };
        CHECK(has(DiagnosticKind::DuplicateName));
        CHECK(has(DiagnosticKind::DanglingArc));
        CHECK(has(DiagnosticKind::DuplicateArc));
        CHECK(has(DiagnosticKind::BadMarking));
    }

    TEST_CASE("emit is canonical")
    {
        auto net = parse_net("place a initial\nplace b\ntrans t\nout t b\nin a t");
        CHECK(emitted(net) == "place a initial\nplace b\ntrans t\nin a t\nout t b\n");
    }

    TEST_CASE("parse(emit(net)) == net on generated nets")
    {
        for (std::uint64_t seed = 1; seed <= 200; ++seed) {
            CAPTURE(seed);
            auto net = random_net(seed, 1 + seed % 12, seed % 9);
            CHECK(parse_net(emitted(net)) == net);

            auto nupn = random_safe_net(seed, 2 + seed % 11, 1 + seed % 7);
            nupn.root_unit = seed % 2 ? std::optional<std::string>(nupn.units.front().name) : std::nullopt;
            std::ostringstream ss;
            emit_nupn(nupn, ss);
            CHECK(parse_nupn(ss.str()) == nupn);
        }
    }

    TEST_CASE("units of a parsed nupn partition the places")
    {
        for (std::uint64_t seed = 1; seed <= 50; ++seed) {
            auto nupn = random_safe_net(seed, 3 + seed % 10, 4);
            std::ostringstream ss;
            emit_nupn(nupn, ss);
            auto back = parse_nupn(ss.str());
            std::multiset<std::uint32_t> seen;
            for (const auto& u : back.units) {
                for (auto p : u.places)
                    seen.insert(p.value);
            }
            CHECK(seen.size() == back.net.place_count());
            CHECK(std::set<std::uint32_t>(seen.begin(), seen.end()).size() == back.net.place_count());
        }
    }
}
