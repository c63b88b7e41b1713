#pragma once

namespace dnolab {

inline constexpr const char* kVersion = "0.1.0";
// Every operator in the library is 2(dbar dbar* + dbar* dbar); reports carry this tag.
inline constexpr const char* kOperatorConvention = "2box";

}  // namespace dnolab
