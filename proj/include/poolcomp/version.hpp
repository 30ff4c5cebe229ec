#pragma once

namespace poolcomp {
inline constexpr const char* kVersion = "0.1.0";
}
