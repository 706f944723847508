#pragma once

namespace conecalc {

inline constexpr const char* kVersion = "1.0.0";

}  // namespace conecalc
