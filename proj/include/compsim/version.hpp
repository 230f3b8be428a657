#pragma once

namespace compsim {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace compsim
