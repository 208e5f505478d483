#pragma once

#include "nupnsat/error.hpp"

#include <doctest.h>

#include <optional>
#include <string>

namespace testing {

/// Code of the nupnsat::Error thrown by `fn`, or nullopt if it returns.
template <class Fn>
std::optional<nupnsat::Errc> error_code(Fn&& fn)
{
    try {
        fn();
    } catch (const nupnsat::Error& e) {
        return e.code();
    }
    return std::nullopt;
}

} // namespace testing

#define CHECK_ERRC(expr, errc) CHECK(::testing::error_code([&] { (void)(expr); }) == std::optional(errc))
