#pragma once

namespace corowave {

inline constexpr const char* kVersion = "0.1.0";

}
