#pragma once

namespace boseglow {

inline constexpr const char* kVersion = "0.1.0";

} // namespace boseglow
