#pragma once

namespace credulens {

inline constexpr const char* kToolName = "credulens";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace credulens
