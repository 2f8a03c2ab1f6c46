#pragma once

namespace tautring {
inline constexpr const char* kVersion = "0.1.0";
}
