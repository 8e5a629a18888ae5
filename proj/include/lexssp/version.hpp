#pragma once

namespace lexssp {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace lexssp
