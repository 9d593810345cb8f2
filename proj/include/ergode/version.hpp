#pragma once

namespace ergode {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ergode
