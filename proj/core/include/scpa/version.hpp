#pragma once

namespace scpa {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace scpa
