#pragma once

#include <string>
#include <string_view>

namespace evt {

/// Shortest round-trip decimal form; non-finite values print as "inf",
/// "-inf" and "nan".
std::string format_number(double v);

/// Whole-string parse of a decimal number; false on any leftover text.
bool parse_number(std::string_view s, double& out);

}  // namespace evt
