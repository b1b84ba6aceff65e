#pragma once

namespace repen {
inline constexpr const char* kVersion = "0.1.0";
}
