#pragma once

namespace equipart {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace equipart
