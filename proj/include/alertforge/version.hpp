#pragma once

namespace alertforge {

inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace alertforge
