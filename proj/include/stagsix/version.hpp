#pragma once

namespace stagsix {
inline constexpr const char* kVersion = "0.1.0";
}
