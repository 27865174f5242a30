#pragma once

namespace vieta {

inline constexpr const char* kVersion = "0.1.0";

} // namespace vieta
