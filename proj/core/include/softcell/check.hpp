#pragma once

#include <stdexcept>
#include <string>

namespace softcell {

// Precondition check; violations are programming/configuration errors, so an
// exception (not an assert) lets the CLI map them to its bad-config exit code.
inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace softcell
