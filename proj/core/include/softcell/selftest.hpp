#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace softcell::selftest {

// One numbered verification check.  `detail` is a space-separated list of
// key=value measurements so a failing line carries the numbers that decided
// it.
struct CheckResult {
  int number = 0;
  std::string name;
  bool passed = false;
  double seconds = 0.0;
  std::string detail;
};

inline constexpr int kNumChecks = 13;

// Runs one check (1-based).  Tolerances and reference values are pinned in
// the implementation; `seed` moves the Monte Carlo draws, `threads` only the
// scheduling (never the numbers).  Throws std::out_of_range on a bad number.
CheckResult run_check(int number, std::uint64_t seed = 1, unsigned threads = 0);

// All checks in order.
std::vector<CheckResult> run_all(std::uint64_t seed = 1, unsigned threads = 0);

}  // namespace softcell::selftest
