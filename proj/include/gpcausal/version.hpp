#pragma once

namespace gpcausal {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace gpcausal
