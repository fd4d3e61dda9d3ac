#pragma once

namespace waveleton {
inline constexpr const char* kVersion = "1.0.0";
}
