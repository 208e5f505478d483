#include "nupnsat/net.hpp"

#include "nupnsat/error.hpp"
#include "text_util.hpp"

#include <algorithm>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

namespace nupnsat {

namespace {

struct Directive {
    std::size_t line;
    std::vector<std::string> args; // args[0] is the keyword
};

enum class NodeKind { Place, Transition, Unit };

struct NodeRef {
    NodeKind kind;
    std::uint32_t index; // 1-based
};

std::string quoted(std::string_view s) { return "\"" + std::string(s) + "\""; }

class NetParser {
public:
    explicit NetParser(bool allow_units) : allow_units_(allow_units) {}

    Nupn parse(std::string_view text)
    {
        std::vector<Directive> directives;
        detail::for_each_line(text, '#', [&](std::size_t line, const std::vector<std::string_view>& tokens) {
            Directive d{line, {}};
            d.args.reserve(tokens.size());
            for (auto t : tokens)
                d.args.emplace_back(t);
            directives.push_back(std::move(d));
        });

        for (const auto& d : directives)
            declare(d);
        if (result_.root_unit) {
            auto it = names_.find(*result_.root_unit);
            if (it == names_.end() || it->second.kind != NodeKind::Unit)
                throw Error(Errc::UndeclaredNode, "unit " + quoted(*result_.root_unit), root_line_);
        }
        for (const auto& d : directives)
            connect(d);

        auto& net = result_.net;
        std::sort(net.pre_arcs.begin(), net.pre_arcs.end());
        std::sort(net.post_arcs.begin(), net.post_arcs.end());
        std::sort(net.initial_marking.begin(), net.initial_marking.end());

        if (allow_units_)
            check_partition(directives);
        return std::move(result_);
    }

private:
    void declare_name(const std::string& name, NodeRef ref, std::size_t line)
    {
        if (!detail::is_valid_name(name))
            throw Error(Errc::Syntax, "invalid name " + quoted(name), line);
        if (!names_.emplace(name, ref).second)
            throw Error(Errc::DuplicateName, quoted(name), line);
    }

    void declare(const Directive& d)
    {
        const auto& kw = d.args[0];
        auto& net = result_.net;
        if (kw == "place") {
            bool initial = false;
            if (d.args.size() == 3 && d.args[2] == "initial")
                initial = true;
            else if (d.args.size() != 2)
                throw Error(Errc::Syntax, "expected: place <name> [initial]", d.line);
            auto index = static_cast<std::uint32_t>(net.places.size() + 1);
            declare_name(d.args[1], {NodeKind::Place, index}, d.line);
            net.places.push_back(d.args[1]);
            if (initial)
                net.initial_marking.emplace_back(index);
        } else if (kw == "trans") {
            if (d.args.size() != 2)
                throw Error(Errc::Syntax, "expected: trans <name>", d.line);
            auto index = static_cast<std::uint32_t>(net.transitions.size() + 1);
            declare_name(d.args[1], {NodeKind::Transition, index}, d.line);
            net.transitions.push_back(d.args[1]);
        } else if (kw == "unit" && allow_units_) {
            if (d.args.size() < 2)
                throw Error(Errc::Syntax, "expected: unit <name> <place>...", d.line);
            auto index = static_cast<std::uint32_t>(result_.units.size() + 1);
            declare_name(d.args[1], {NodeKind::Unit, index}, d.line);
            result_.units.push_back(Unit{d.args[1], {}});
        } else if (kw == "root" && allow_units_) {
            if (d.args.size() != 2)
                throw Error(Errc::Syntax, "expected: root <name>", d.line);
            if (result_.root_unit)
                throw Error(Errc::Syntax, "root declared twice", d.line);
            result_.root_unit = d.args[1];
            root_line_ = d.line;
        } else if (kw != "in" && kw != "out") {
            throw Error(Errc::Syntax, "unknown directive " + quoted(kw), d.line);
        }
    }

    std::uint32_t lookup(const std::string& name, NodeKind kind, std::size_t line) const
    {
        auto it = names_.find(name);
        if (it == names_.end() || it->second.kind != kind) {
            const char* what = kind == NodeKind::Place ? "place " : "transition ";
            throw Error(Errc::UndeclaredNode, what + quoted(name), line);
        }
        return it->second.index;
    }

    void connect(const Directive& d)
    {
        const auto& kw = d.args[0];
        auto& net = result_.net;
        if (kw == "in") {
            if (d.args.size() != 3)
                throw Error(Errc::Syntax, "expected: in <place> <trans>", d.line);
            PlaceIndex p{lookup(d.args[1], NodeKind::Place, d.line)};
            TransitionIndex t{lookup(d.args[2], NodeKind::Transition, d.line)};
            if (!pre_seen_.insert(key(p.value, t.value)).second)
                throw Error(Errc::NonOrdinary, "duplicate arc " + d.args[1] + " -> " + d.args[2], d.line);
            net.pre_arcs.emplace_back(p, t);
        } else if (kw == "out") {
            if (d.args.size() != 3)
                throw Error(Errc::Syntax, "expected: out <trans> <place>", d.line);
            TransitionIndex t{lookup(d.args[1], NodeKind::Transition, d.line)};
            PlaceIndex p{lookup(d.args[2], NodeKind::Place, d.line)};
            if (!post_seen_.insert(key(t.value, p.value)).second)
                throw Error(Errc::NonOrdinary, "duplicate arc " + d.args[1] + " -> " + d.args[2], d.line);
            net.post_arcs.emplace_back(t, p);
        } else if (kw == "unit") {
            auto& unit = result_.units[names_.at(d.args[1]).index - 1];
            for (std::size_t i = 2; i < d.args.size(); ++i) {
                auto it = names_.find(d.args[i]);
                if (it != names_.end() && it->second.kind == NodeKind::Unit)
                    throw Error(Errc::NestedUnit, "unit " + quoted(unit.name) + " contains unit " + quoted(d.args[i]),
                                d.line);
                PlaceIndex p{lookup(d.args[i], NodeKind::Place, d.line)};
                if (auto [owner, fresh] = owner_.emplace(p.value, unit.name); !fresh)
                    throw Error(Errc::OverlappingUnits, "place " + quoted(d.args[i]) + " in units " + quoted(owner->second)
                                    + " and " + quoted(unit.name),
                                d.line);
                unit.places.push_back(p);
            }
            std::sort(unit.places.begin(), unit.places.end());
        }
    }

    void check_partition(const std::vector<Directive>& directives)
    {
        for (const auto& d : directives) {
            if (d.args[0] == "unit" && d.args.size() == 2)
                throw Error(Errc::Syntax, "unit " + quoted(d.args[1]) + " has no places", d.line);
        }
        const auto& places = result_.net.places;
        for (std::uint32_t p = 1; p <= places.size(); ++p) {
            if (!owner_.contains(p))
                throw Error(Errc::UncoveredPlace, "place " + quoted(places[p - 1]) + " belongs to no unit");
        }
    }

    static std::uint64_t key(std::uint32_t a, std::uint32_t b) { return (std::uint64_t{a} << 32) | b; }

    bool allow_units_;
    Nupn result_;
    std::size_t root_line_ = 0;
    std::unordered_map<std::string, NodeRef> names_;
    std::unordered_set<std::uint64_t> pre_seen_;
    std::unordered_set<std::uint64_t> post_seen_;
    std::unordered_map<std::uint32_t, std::string> owner_;
};

} // namespace

PetriNet parse_net(std::string_view text) { return NetParser(false).parse(text).net; }

Nupn parse_nupn(std::string_view text) { return NetParser(true).parse(text); }

void emit_net(const PetriNet& net, std::ostream& out)
{
    std::size_t m = 0;
    for (std::size_t i = 0; i < net.places.size(); ++i) {
        out << "place " << net.places[i];
        while (m < net.initial_marking.size() && net.initial_marking[m].offset() < i)
            ++m;
        if (m < net.initial_marking.size() && net.initial_marking[m].offset() == i)
            out << " initial";
        out << '\n';
    }
    for (const auto& t : net.transitions)
        out << "trans " << t << '\n';
    for (auto [p, t] : net.pre_arcs)
        out << "in " << net.places[p.offset()] << ' ' << net.transitions[t.offset()] << '\n';
    for (auto [t, p] : net.post_arcs)
        out << "out " << net.transitions[t.offset()] << ' ' << net.places[p.offset()] << '\n';
}

void emit_nupn(const Nupn& nupn, std::ostream& out)
{
    emit_net(nupn.net, out);
    if (nupn.root_unit)
        out << "root " << *nupn.root_unit << '\n';
    for (const auto& unit : nupn.units) {
        out << "unit " << unit.name;
        for (auto p : unit.places)
            out << ' ' << nupn.net.places[p.offset()];
        out << '\n';
    }
}

std::string_view to_string(DiagnosticKind kind)
{
    switch (kind) {
    case DiagnosticKind::IsolatedPlace: return "IsolatedPlace";
    case DiagnosticKind::IsolatedTransition: return "IsolatedTransition";
    case DiagnosticKind::SourceTransition: return "SourceTransition";
    case DiagnosticKind::EmptyMarking: return "EmptyMarking";
    case DiagnosticKind::EmptyName: return "EmptyName";
    case DiagnosticKind::DuplicateName: return "DuplicateName";
    case DiagnosticKind::DanglingArc: return "DanglingArc";
    case DiagnosticKind::DuplicateArc: return "DuplicateArc";
    case DiagnosticKind::BadMarking: return "BadMarking";
    }
    return "Unknown";
}

std::vector<Diagnostic> validate(const PetriNet& net)
{
    std::vector<Diagnostic> out;
    auto error = [&](DiagnosticKind k, std::string s) { out.push_back({Severity::Error, k, std::move(s)}); };
    auto warning = [&](DiagnosticKind k, std::string s) { out.push_back({Severity::Warning, k, std::move(s)}); };

    std::unordered_set<std::string_view> names;
    for (const auto* list : {&net.places, &net.transitions}) {
        for (const auto& name : *list) {
            if (name.empty())
                error(DiagnosticKind::EmptyName, {});
            else if (!names.insert(name).second)
                error(DiagnosticKind::DuplicateName, name);
        }
    }

    const auto np = net.place_count();
    const auto nt = net.transition_count();
    auto place_ok = [&](PlaceIndex p) { return p.value >= 1 && p.value <= np; };
    auto trans_ok = [&](TransitionIndex t) { return t.value >= 1 && t.value <= nt; };

    std::vector<bool> place_used(np, false);
    std::vector<bool> trans_has_input(nt, false);
    std::vector<bool> trans_has_output(nt, false);

    std::unordered_set<std::uint64_t> seen;
    for (auto [p, t] : net.pre_arcs) {
        if (!place_ok(p) || !trans_ok(t)) {
            error(DiagnosticKind::DanglingArc, "in " + std::to_string(p.value) + " " + std::to_string(t.value));
            continue;
        }
        if (!seen.insert((std::uint64_t{p.value} << 32) | t.value).second)
            error(DiagnosticKind::DuplicateArc, "in " + net.places[p.offset()] + " " + net.transitions[t.offset()]);
        place_used[p.offset()] = true;
        trans_has_input[t.offset()] = true;
    }
    seen.clear();
    for (auto [t, p] : net.post_arcs) {
        if (!place_ok(p) || !trans_ok(t)) {
            error(DiagnosticKind::DanglingArc, "out " + std::to_string(t.value) + " " + std::to_string(p.value));
            continue;
        }
        if (!seen.insert((std::uint64_t{t.value} << 32) | p.value).second)
            error(DiagnosticKind::DuplicateArc, "out " + net.transitions[t.offset()] + " " + net.places[p.offset()]);
        place_used[p.offset()] = true;
        trans_has_output[t.offset()] = true;
    }

    std::vector<PlaceIndex> marking = net.initial_marking;
    std::sort(marking.begin(), marking.end());
    for (std::size_t i = 0; i < marking.size(); ++i) {
        if (!place_ok(marking[i]) || (i > 0 && marking[i] == marking[i - 1]))
            error(DiagnosticKind::BadMarking, std::to_string(marking[i].value));
    }

    for (std::size_t i = 0; i < np; ++i) {
        if (!place_used[i])
            warning(DiagnosticKind::IsolatedPlace, net.places[i]);
    }
    for (std::size_t i = 0; i < nt; ++i) {
        if (!trans_has_input[i] && !trans_has_output[i])
            warning(DiagnosticKind::IsolatedTransition, net.transitions[i]);
        else if (!trans_has_input[i])
            warning(DiagnosticKind::SourceTransition, net.transitions[i]);
    }
    if (net.initial_marking.empty())
        warning(DiagnosticKind::EmptyMarking, {});
    return out;
}

bool has_errors(const std::vector<Diagnostic>& diagnostics)
{
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

} // namespace nupnsat
