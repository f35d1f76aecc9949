#pragma once

namespace rwre {

inline constexpr const char* kVersion = "rwre-mle 0.1.0";

}  // namespace rwre
