#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "softcell/rng.hpp"

using softcell::Rng;

// The generator is the reproducibility contract: every frozen seed in the
// test suite and every published number depends on these exact outputs, so
// the first words of a few streams are pinned here.  If this test breaks,
// the change invalidated all recorded results, not just this file.
TEST_CASE("frozen stream outputs") {
  Rng r10(1, 0);
  CHECK(r10.next_u64() == 16324680945101173422ULL);
  CHECK(r10.next_u64() == 13648454084390818645ULL);
  CHECK(r10.next_u64() == 1587849503307170953ULL);

  Rng r17(1, 7);
  CHECK(r17.next_u64() == 1955299130535258503ULL);
  CHECK(r17.next_u64() == 11097185277691155131ULL);

  Rng rd(42, 3);
  CHECK(rd.next_double() == doctest::Approx(0.74694190541560912).epsilon(1e-16));
  CHECK(rd.next_double() == doctest::Approx(0.50556328748591506).epsilon(1e-16));
}

TEST_CASE("same seed and stream replay identically") {
  Rng a(9001, 5);
  Rng b(9001, 5);
  for (int i = 0; i < 1000; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("reseed restarts the stream") {
  Rng a(77, 2);
  const std::uint64_t first = a.next_u64();
  for (int i = 0; i < 10; ++i) a.next_u64();
  a.reseed(77, 2);
  CHECK(a.next_u64() == first);
}

TEST_CASE("neighbouring streams do not collide") {
  Rng a(123, 0);
  Rng b(123, 1);
  int equal = 0;
  for (int i = 0; i < 1000; ++i) equal += a.next_u64() == b.next_u64() ? 1 : 0;
  CHECK(equal == 0);
}

TEST_CASE("next_double range and mean") {
  Rng r(31337, 0);
  const int n = 200000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.next_double();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    sum += u;
  }
  // sigma of the mean is 1/sqrt(12 n); allow five of them.
  CHECK(std::abs(sum / n - 0.5) < 5.0 / std::sqrt(12.0 * n));
}

TEST_CASE("next_index bounds and coverage") {
  Rng r(5, 5);
  std::vector<int> hits(7, 0);
  for (int i = 0; i < 7000; ++i) {
    const std::uint64_t k = r.next_index(7);
    REQUIRE(k < 7);
    ++hits[static_cast<std::size_t>(k)];
  }
  for (int h : hits) CHECK(h > 800);  // expectation 1000, five sigma is ~150
  Rng one(6, 0);
  for (int i = 0; i < 100; ++i) CHECK(one.next_index(1) == 0);
}

TEST_CASE("unit circular normal moments") {
  Rng r(2718, 0);
  const int n = 400000;
  double sum_re = 0.0;
  double sum_im = 0.0;
  double sum_sq = 0.0;
  double sum_4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const std::complex<double> z = r.next_unit_cnormal();
    sum_re += z.real();
    sum_im += z.imag();
    const double p = std::norm(z);
    sum_sq += p;
    sum_4 += p * p;
  }
  // |z|^2 is Exp(1): mean 1 (sd 1), second moment 2 (sd sqrt(20)).
  CHECK(std::abs(sum_re / n) < 5.0 * std::sqrt(0.5 / n));
  CHECK(std::abs(sum_im / n) < 5.0 * std::sqrt(0.5 / n));
  CHECK(std::abs(sum_sq / n - 1.0) < 5.0 / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(sum_4 / n - 2.0) < 5.0 * std::sqrt(20.0 / n));
}

TEST_CASE("squared magnitude follows the unit exponential law") {
  Rng r(2024, 0);
  const std::size_t n = 20000;
  std::vector<double> x(n);
  for (auto& v : x) v = std::norm(r.next_unit_cnormal());
  std::sort(x.begin(), x.end());
  double d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double f = 1.0 - std::exp(-x[i]);
    d = std::max(d, std::max(f - static_cast<double>(i) / n,
                             static_cast<double>(i + 1) / n - f));
  }
  // Kolmogorov-Smirnov against Exp(1); this fixed draw sits at 0.66, the
  // 1% critical point is 1.63.
  CHECK(d * std::sqrt(static_cast<double>(n)) < 1.3);
}
