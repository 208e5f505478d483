#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nupnsat {

enum class Errc {
    Syntax,
    DuplicateName,
    UndeclaredNode,
    NonOrdinary,
    OverlappingUnits,
    UncoveredPlace,
    NestedUnit,
    UnsafeNet,
    LimitExceeded,
    IndexOutOfRange,
    ReflexivePair,
    DuplicatePair,
    UnitOutOfRange,
    MalformedCnf,
    UnsatResult,
    MalformedModel,
    NoUnit,
    TooLarge,
    InconsistentVerdicts,
    NonMonotoneVerdicts,
    SolverUnknown,
    EmptyReport,
    SpawnFailure,
    InvalidConfig,
    Io,
};

std::string_view to_string(Errc code);

/// Domain error. `line()` is the 1-based input line for parser errors, 0 otherwise.
class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message, std::size_t line = 0);

    Errc code() const noexcept { return code_; }
    std::size_t line() const noexcept { return line_; }
    /// The message without the code and line decoration.
    const std::string& message() const noexcept { return message_; }

private:
    Errc code_;
    std::size_t line_;
    std::string message_;
};

} // namespace nupnsat
