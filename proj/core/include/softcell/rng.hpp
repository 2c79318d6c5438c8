#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>

namespace softcell {

// SplitMix64 step, used to expand (seed, stream) pairs into generator state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256++ with explicitly seeded, cheaply derivable substreams.
//
// Reproducibility contract: Monte Carlo trial t always draws from the stream
// (seed, t), so results are identical for any worker count or scheduling
// order.  The uniform->normal transforms are hand-rolled because the std::
// distributions are implementation-defined and would break that contract
// across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0) { reseed(seed, stream); }

  void reseed(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t s = seed ^ (stream * 0x9e3779b97f4a7c15ULL + 0x6a09e667f3bcc909ULL);
    for (auto& word : state_) word = splitmix64(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n), n > 0 (fixed-point multiply, bias < n / 2^64).
  std::uint64_t next_index(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Independent standard normal pair via Marsaglia's polar method.
  void next_normal_pair(double& n0, double& n1) {
    double u, v, s;
    do {
      u = 2.0 * next_double() - 1.0;
      v = 2.0 * next_double() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    n0 = u * f;
    n1 = v * f;
  }

  // Circularly symmetric complex normal with E|z|^2 = 1 (components N(0, 1/2)).
  std::complex<double> next_unit_cnormal() {
    double x, y;
    next_normal_pair(x, y);
    constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;
    return {x * kInvSqrt2, y * kInvSqrt2};
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::array<std::uint64_t, 4> state_;
};

}  // namespace softcell
