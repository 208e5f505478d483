#pragma once

#include "nupnsat/index.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace nupnsat {

/// Ordinary Petri net. Place `i` (1-based) is `places[i-1]`; indices follow
/// declaration order. Arc lists are kept sorted and duplicate-free, so two
/// nets with the same structure compare equal regardless of arc order in the
/// source file.
struct PetriNet {
    std::vector<std::string> places;
    std::vector<std::string> transitions;
    std::vector<std::pair<PlaceIndex, TransitionIndex>> pre_arcs;
    std::vector<std::pair<TransitionIndex, PlaceIndex>> post_arcs;
    std::vector<PlaceIndex> initial_marking; // sorted

    std::size_t place_count() const { return places.size(); }
    std::size_t transition_count() const { return transitions.size(); }

    friend bool operator==(const PetriNet&, const PetriNet&) = default;
};

/// One unit of a flat NUPN: a named, nonempty set of places.
struct Unit {
    std::string name;
    std::vector<PlaceIndex> places; // sorted

    friend bool operator==(const Unit&, const Unit&) = default;
};

/// Flat nested-unit Petri net: units partition the places.
struct Nupn {
    PetriNet net;
    std::vector<Unit> units;
    std::optional<std::string> root_unit;

    friend bool operator==(const Nupn&, const Nupn&) = default;
};

PetriNet parse_net(std::string_view text);
Nupn parse_nupn(std::string_view text);

/// Writes `.snet` text that parses back to `net`.
void emit_net(const PetriNet& net, std::ostream& out);
/// Writes `.snupn` text that parses back to `nupn`.
void emit_nupn(const Nupn& nupn, std::ostream& out);

enum class Severity { Warning, Error };

enum class DiagnosticKind {
    IsolatedPlace,
    IsolatedTransition,
    SourceTransition, // no input place: always enabled
    EmptyMarking,
    EmptyName,
    DuplicateName,
    DanglingArc,
    DuplicateArc,
    BadMarking,
};

struct Diagnostic {
    Severity severity;
    DiagnosticKind kind;
    std::string subject;

    friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

std::string_view to_string(DiagnosticKind kind);

/// Static checks. Errors are only possible for nets built in code, since the
/// parser already rejects them; parsed nets can still carry warnings.
std::vector<Diagnostic> validate(const PetriNet& net);

bool has_errors(const std::vector<Diagnostic>& diagnostics);

} // namespace nupnsat
