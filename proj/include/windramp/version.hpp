#pragma once

namespace windramp {

inline constexpr const char* kVersion = "0.1.0";

} // namespace windramp
