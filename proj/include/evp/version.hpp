#pragma once

namespace evp {

inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace evp
