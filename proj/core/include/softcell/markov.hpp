#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "softcell/fading.hpp"
#include "softcell/rng.hpp"

namespace softcell {

// Squared sine of the angle between two complex vectors,
// 1 - |<a;b>|^2 / (|a|^2 |b|^2), clamped to [0, 1].  Scalars are always
// collinear, so single-user groups give exactly zero.
double sin_sq(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b);

// One step of the scalar chain that tracks the excess pivot mass at high SNR:
//   e' = delta + |a|^2 (e + |b|^2 sin^2(a,b)) / (e + |b|^2),
// where delta >= 0 is the spectral shift (0 in the high-SNR limit).  The map
// is monotone in e; e = +infinity is a valid input and steps to
// delta + |a|^2.
double e_step(double e, std::span<const std::complex<double>> a,
              std::span<const std::complex<double>> b, double delta);

// Single-user-group form of the chain normalized to (0, 1):
//   e' = (delta + a_sq e) / (delta + b_sq + a_sq e).
double unit_interval_step(double e, double a_sq, double b_sq, double delta);

enum class ChainStart { Zero, Infinity, Value };

struct EChainConfig {
  FadingModel model_a;
  FadingModel model_b;
  std::size_t users = 1;
  double delta = 0.0;
  ChainStart start = ChainStart::Zero;
  double start_value = 0.0;  // used when start == ChainStart::Value
};

// Runs the chain for `steps` steps and returns the final state; optionally
// records the state after every step.
double run_chain(const EChainConfig& config, std::uint64_t steps, Rng& rng,
                 std::vector<double>* trajectory = nullptr);

// One rung of the bound ladder: offsets are bounds on lim C(P) - log P in
// nats; the bit-domain fields bound the high-SNR power offset (note the
// swap: the offset's lower bound gives the power offset's upper bound).
struct OffsetBound {
  std::uint32_t order = 0;
  double lower_nats = 0.0;
  double lower_se = 0.0;
  double upper_nats = 0.0;
  double upper_se = 0.0;
  double gap_se = 0.0;         // SE of the per-trial upper-lower difference
  double lower_step_se = 0.0;  // SE of per-trial lower_n - lower_{n-1}; 0 at order 1
  double upper_step_se = 0.0;
  double l_inf_lower_bits = 0.0;
  double l_inf_lower_se_bits = 0.0;
  double l_inf_upper_bits = 0.0;
  double l_inf_upper_se_bits = 0.0;
};

struct OffsetBoundLadder {
  std::size_t users = 0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  bool coupled = true;
  std::vector<OffsetBound> entries;  // orders 1..max_order
};

// Monte Carlo ladder of offset bounds of orders 1..max_order.  Order n runs
// the chain n steps from the two extreme starts and scores
// E log((e_n + |b'|^2) / K) with a probe b' independent of the chain.
//
// With `coupled` set (the default), each trial aligns all orders on the same
// draws counted from the recording end and scores them with one shared
// probe.  The extreme starts then bracket every trajectory, so within a
// trial lower_n is nondecreasing in n, upper_n is nonincreasing, and
// lower_n <= upper_n — surely, not just on average.  With `coupled` unset
// the two starts use independent draws (useful for judging how much the
// coupling narrows the estimated gap).
OffsetBoundLadder offset_ladder(const FadingModel& model_a, const FadingModel& model_b,
                                std::size_t users, std::uint32_t max_order,
                                std::uint64_t trials, std::uint64_t seed, bool coupled = true,
                                unsigned threads = 0);

// The final rung only.
OffsetBound offset_bounds(const FadingModel& model_a, const FadingModel& model_b,
                          std::size_t users, std::uint32_t order, std::uint64_t trials,
                          std::uint64_t seed, bool coupled = true, unsigned threads = 0);

struct StationaryOffset {
  double offset_nats = 0.0;
  double se_nats = 0.0;
  double l_inf_bits = 0.0;
  double l_inf_se_bits = 0.0;
  std::uint64_t burn_in = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

// Long-run estimate of lim C(P) - log P from a single stationary chain with
// batch-means errors.
StationaryOffset stationary_offset(const FadingModel& model_a, const FadingModel& model_b,
                                   std::size_t users, std::uint64_t burn_in,
                                   std::uint64_t samples, std::uint64_t seed);

struct TdmaOffset {
  double offset_nats = 0.0;
  double se_nats = 0.0;
  double l_inf_bits = 0.0;
  double l_inf_se_bits = 0.0;
};

// High-SNR offset of the time-sharing protocol, 2 max(E log|a|, E log|b|)
// nats; exact when both laws have closed-form log moments.
TdmaOffset high_snr_offset_tdma(const FadingModel& model_a, const FadingModel& model_b,
                                std::uint64_t mc_samples = kDefaultMomentSamples,
                                std::uint64_t seed = kDefaultMomentSeed);

}  // namespace softcell
