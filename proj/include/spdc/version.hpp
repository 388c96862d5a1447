#pragma once

namespace spdc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace spdc
