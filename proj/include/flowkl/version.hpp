#pragma once

namespace flowkl {

inline constexpr const char* kVersion = "0.1.0";

} // namespace flowkl
