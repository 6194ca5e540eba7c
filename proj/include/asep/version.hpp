#pragma once

namespace asep {
inline constexpr const char* kVersion = "1.0.0";
}
