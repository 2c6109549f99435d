#pragma once

#include <cstdio>
#include <string>

namespace dicka {

/// 17 significant digits: enough for any double to round-trip.
inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace dicka
