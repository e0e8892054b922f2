#pragma once

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>

namespace smcp {

// Shortest "%g" rendering with the given number of significant digits.
// Non-finite values render as JSON-compatible null.
inline std::string format_number(double x, int digits = 9) {
  if (!std::isfinite(x)) return "null";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// x rounded to `digits` significant digits.
inline double round_significant(double x, int digits = 9) {
  if (!std::isfinite(x)) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return std::strtod(buf, nullptr);
}

}  // namespace smcp
