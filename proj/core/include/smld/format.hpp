#pragma once

#include <string>

namespace smld {

// Shortest round-trip decimal, '.' separator, no locale; "nan", "inf", "-inf"
// for non-finite values.
std::string format_number(double v);

}  // namespace smld
