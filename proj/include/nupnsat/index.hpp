#pragma once

#include <compare>
#include <cstdint>
#include <functional>

namespace nupnsat {

/// 1-based index with a tag so place and transition indices cannot be mixed.
template <class Tag>
struct StrongIndex {
    std::uint32_t value = 0;

    constexpr StrongIndex() = default;
    constexpr explicit StrongIndex(std::uint32_t v) : value(v) {}

    /// 0-based offset for vector access.
    constexpr std::size_t offset() const { return value - 1; }

    friend constexpr auto operator<=>(StrongIndex, StrongIndex) = default;
};

struct PlaceTag {};
struct TransitionTag {};

using PlaceIndex = StrongIndex<PlaceTag>;
using TransitionIndex = StrongIndex<TransitionTag>;

} // namespace nupnsat

template <class Tag>
struct std::hash<nupnsat::StrongIndex<Tag>> {
    std::size_t operator()(nupnsat::StrongIndex<Tag> i) const noexcept { return std::hash<std::uint32_t>{}(i.value); }
};
