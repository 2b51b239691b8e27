#pragma once

namespace fairlens {
inline constexpr const char* kVersion = "0.1.0";
}
