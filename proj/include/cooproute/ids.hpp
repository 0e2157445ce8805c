#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <ostream>

namespace cooproute {

/// Integer identifier tagged with the kind of object it names, so a link id
/// cannot be passed where a node id is expected.
template <typename Tag>
struct StrongId {
  int value = 0;

  constexpr StrongId() = default;
  constexpr explicit StrongId(int v) : value(v) {}

  friend constexpr auto operator<=>(StrongId, StrongId) = default;
  friend std::ostream& operator<<(std::ostream& os, StrongId id) {
    return os << id.value;
  }
};

using NodeId = StrongId<struct NodeTag>;
using LinkId = StrongId<struct LinkTag>;
using UserId = StrongId<struct UserTag>;

}  // namespace cooproute

template <typename Tag>
struct std::hash<cooproute::StrongId<Tag>> {
  std::size_t operator()(cooproute::StrongId<Tag> id) const noexcept {
    return std::hash<int>{}(id.value);
  }
};
