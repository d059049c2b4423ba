#pragma once

namespace biviso {
inline constexpr const char* kVersion = "0.1.0";
}
