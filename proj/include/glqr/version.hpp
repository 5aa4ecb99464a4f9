#pragma once

namespace glqr {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace glqr
