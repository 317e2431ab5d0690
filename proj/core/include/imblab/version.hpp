#pragma once

namespace imblab {

inline constexpr int kSchemaVersion = 1;
inline constexpr const char* kVersionString = "0.1.0";

} // namespace imblab
