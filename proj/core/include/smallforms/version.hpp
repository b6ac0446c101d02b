#pragma once

#include <string>

namespace smallforms {

inline constexpr const char* kEngineName = "smallforms";
inline constexpr const char* kEngineVersion = "0.1.0";

inline std::string engine_version_string() {
  return std::string(kEngineName) + " " + kEngineVersion;
}

}  // namespace smallforms
