#pragma once

#include <string>

namespace fieldnorm {

inline constexpr const char* kFormatVersion = "fieldnorm-1";

// Fixed 9-significant-digit rendering used for every serialized float.
std::string format_real(double value);

// Rounds a value to what format_real would print, for JSON emission.
double round_real(double value);

}  // namespace fieldnorm
