#pragma once

namespace aftnet {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace aftnet
