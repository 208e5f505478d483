#include "nupnsat/error.hpp"

namespace nupnsat {

std::string_view to_string(Errc code)
{
    switch (code) {
    case Errc::Syntax: return "Syntax";
    case Errc::DuplicateName: return "DuplicateName";
    case Errc::UndeclaredNode: return "UndeclaredNode";
    case Errc::NonOrdinary: return "NonOrdinary";
    case Errc::OverlappingUnits: return "OverlappingUnits";
    case Errc::UncoveredPlace: return "UncoveredPlace";
    case Errc::NestedUnit: return "NestedUnit";
    case Errc::UnsafeNet: return "UnsafeNet";
    case Errc::LimitExceeded: return "LimitExceeded";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::ReflexivePair: return "ReflexivePair";
    case Errc::DuplicatePair: return "DuplicatePair";
    case Errc::UnitOutOfRange: return "UnitOutOfRange";
    case Errc::MalformedCnf: return "MalformedCnf";
    case Errc::UnsatResult: return "UnsatResult";
    case Errc::MalformedModel: return "MalformedModel";
    case Errc::NoUnit: return "NoUnit";
    case Errc::TooLarge: return "TooLarge";
    case Errc::InconsistentVerdicts: return "InconsistentVerdicts";
    case Errc::NonMonotoneVerdicts: return "NonMonotoneVerdicts";
    case Errc::SolverUnknown: return "SolverUnknown";
    case Errc::EmptyReport: return "EmptyReport";
    case Errc::SpawnFailure: return "SpawnFailure";
    case Errc::InvalidConfig: return "InvalidConfig";
    case Errc::Io: return "Io";
    }
    return "Unknown";
}

namespace {

std::string decorate(Errc code, const std::string& message, std::size_t line)
{
    std::string out(to_string(code));
    if (line != 0)
        out += " at line " + std::to_string(line);
    out += ": ";
    out += message;
    return out;
}

} // namespace

Error::Error(Errc code, std::string message, std::size_t line)
    : std::runtime_error(decorate(code, message, line)), code_(code), line_(line), message_(std::move(message))
{
}

} // namespace nupnsat
