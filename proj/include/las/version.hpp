#pragma once

namespace las {

inline constexpr const char* kCodeVersion = "0.1.0";

}  // namespace las
