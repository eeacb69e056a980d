#pragma once

namespace sppa {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sppa
