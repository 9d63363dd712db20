#pragma once

namespace agc {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace agc
