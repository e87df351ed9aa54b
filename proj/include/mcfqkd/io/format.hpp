#pragma once

#include <string>

namespace mcfqkd::io {

/// Locale-independent shortest form with 9 significant digits; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_number(double value);

}  // namespace mcfqkd::io
