#pragma once

#include <complex>
#include <cstdint>

#include "softcell/channel.hpp"
#include "softcell/fading.hpp"

namespace softcell {

// Shared pivot expression so the matrix-based and the streaming capacity
// paths are bit-identical.
inline double ldl_pivot(double diag, const std::complex<double>& off, double prev_pivot) {
  return diag - std::norm(off) / prev_pivot;
}

// log det via the LDL^dagger factorization of the Hermitian tridiagonal
// matrix.  Throws std::domain_error if a leading minor is not positive.
double logdet_ldl(const TridiagonalHermitian& matrix);

// log det via the three-term recursion on leading principal minors,
// renormalized every step to avoid overflow.  Kept deliberately independent
// of the factorization route: the two serve as cross-checks.
double logdet_recursion(const TridiagonalHermitian& matrix);

struct CapacityEstimate {
  double mean_nats = 0.0;  // per-cell ergodic rate estimate
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::size_t cells = 0;
  std::size_t users = 0;
  double power = 0.0;
  Protocol protocol = Protocol::Wideband;
  std::uint64_t seed = 0;
};

// Monte Carlo estimate of the per-cell ergodic rate (nats/channel use),
//   (1/M) E log det(I + rho H H^dagger),
// with rho = P/K under the wideband protocol.  Under time sharing each slot
// is a single-user uplink at SNR P, so the estimate draws 1-user groups with
// rho = P; the reported `users` stays the nominal group size.
//
// Trial t uses the dedicated stream (seed, t); memory per trial is O(users),
// independent of `cells`, and results do not depend on `threads`.
CapacityEstimate capacity_mc(const FadingModel& model_a, const FadingModel& model_b,
                             std::size_t cells, std::size_t users, double power,
                             Protocol protocol, std::uint64_t trials, std::uint64_t seed,
                             unsigned threads = 0);

}  // namespace softcell
