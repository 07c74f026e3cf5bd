#pragma once

namespace lglab {

inline constexpr const char* tool_name = "lglab";
inline constexpr const char* tool_version = "1.0.0";

}  // namespace lglab
