#pragma once

namespace inferlab {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace inferlab
