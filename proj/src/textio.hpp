#pragma once

#include <string>
#include <vector>

namespace kle {

/// Shortest decimal form of v that still round-trips a double exactly
/// (17 significant digits, '.' separator, no locale).
std::string format_double(double v);

/// One CSV record: fields joined by ',' and terminated with '\n'.
std::string csv_row(const std::vector<std::string>& fields);

}  // namespace kle
