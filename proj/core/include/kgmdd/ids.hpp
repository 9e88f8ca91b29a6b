#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>

namespace kgmdd {

/// Dense integer handle tagged by what it indexes. Ids are assigned in
/// insertion order and never reused.
template <class Tag>
struct Id {
    std::uint32_t value = std::numeric_limits<std::uint32_t>::max();

    constexpr Id() = default;
    constexpr explicit Id(std::uint32_t v) : value(v) {}

    [[nodiscard]] constexpr bool valid() const {
        return value != std::numeric_limits<std::uint32_t>::max();
    }
    [[nodiscard]] constexpr std::size_t index() const { return value; }

    friend constexpr auto operator<=>(Id, Id) = default;
};

using EntityId = Id<struct EntityTag>;
using RelationId = Id<struct RelationTag>;
using NamespaceId = Id<struct NamespaceTag>;

}  // namespace kgmdd

template <class Tag>
struct std::hash<kgmdd::Id<Tag>> {
    std::size_t operator()(kgmdd::Id<Tag> id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
