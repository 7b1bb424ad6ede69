#pragma once

namespace ptelm {

inline constexpr const char* kVersion = "0.1.0";

} // namespace ptelm
