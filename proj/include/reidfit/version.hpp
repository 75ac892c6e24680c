#pragma once

namespace reidfit {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace reidfit
