#pragma once

namespace steersim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace steersim
