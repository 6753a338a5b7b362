#pragma once

namespace defalg {

inline constexpr const char* kVersion = "0.1.0";
inline constexpr const char* kArtifactName = "defalg";

}  // namespace defalg
