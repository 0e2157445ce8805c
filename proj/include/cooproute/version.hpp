#pragma once

namespace cooproute {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace cooproute
