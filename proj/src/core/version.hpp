#pragma once

namespace cms {

inline constexpr const char* kToolName = "cms";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace cms
