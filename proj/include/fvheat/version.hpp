#pragma once

namespace fvheat {

inline constexpr const char* kVersion = "0.1.0";

} // namespace fvheat
