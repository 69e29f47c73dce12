#pragma once

namespace looplink {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace looplink
