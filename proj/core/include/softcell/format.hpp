#pragma once

#include <cstdio>
#include <string>

namespace softcell {

// Shortest representation that round-trips a double (17 significant digits).
// All numeric text output goes through this so that results are byte-stable
// across runs, platforms, and thread counts.
inline std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

}  // namespace softcell
