#pragma once

namespace wta {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace wta
