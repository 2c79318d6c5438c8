#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "softcell/channel.hpp"
#include "softcell/fading.hpp"
#include "softcell/rng.hpp"

namespace softcell {

struct Mat2 {
  std::complex<double> m00{0.0, 0.0};
  std::complex<double> m01{0.0, 0.0};
  std::complex<double> m10{0.0, 0.0};
  std::complex<double> m11{0.0, 0.0};

  static Mat2 identity() { return {{1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, {1.0, 0.0}}; }
};

Mat2 operator*(const Mat2& lhs, const Mat2& rhs);

enum class MatrixNorm { Spectral, Frobenius };

double frobenius_norm(const Mat2& m);
double spectral_norm(const Mat2& m);  // largest singular value, closed form
double matrix_norm(const Mat2& m, MatrixNorm norm);

// Companion (transfer) matrix of the shifted characteristic recurrence
//   x_{n+1} = (lambda - |a_n|^2 - |b_n|^2) / (conj(a_{n+1}) b_n) x_n
//             - a_n conj(b_{n-1}) / (conj(a_{n+1}) b_n) x_{n-1}
// acting on (x_n, x_{n-1}).  Scalar (single-user-group) gains.
Mat2 transfer_matrix(double lambda, std::complex<double> a_n, std::complex<double> a_next,
                     std::complex<double> b_prev, std::complex<double> b_n);

struct RecurrenceLog {
  double log_x_final = 0.0;    // log |x_{M+1}|
  double companion_sum = 0.0;  // sum over steps of log|a_{n+1}| + log|b_n|
  std::uint64_t steps = 0;     // M
};

// Runs the recurrence across a drawn single-user uplink of cells = M + 1 and
// returns log |x_{M+1}| together with the companion log sum; with
// lambda = -1/P these tie the recurrence to the M-cell capacity through
//   log det G_M = M log P + log|x_{M+1}| + companion_sum.
RecurrenceLog recurrence_logx(const ChannelRealization& ch, double lambda);

// Seeded convenience wrapper: draws the (steps + 1)-cell realization itself.
RecurrenceLog recurrence_logx(const FadingModel& model_a, const FadingModel& model_b,
                              double lambda, std::uint64_t steps, std::uint64_t seed);

struct LyapunovEstimate {
  double gamma_hat = 0.0;  // (1/M) E log ||g_M ... g_1||
  double se = 0.0;
  double lambda = 0.0;
  std::uint64_t cells = 0;  // product length M per replicate
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  MatrixNorm norm = MatrixNorm::Spectral;
};

// Top Lyapunov exponent of the transfer cocycle at spectral shift
// lambda < 0, from `reps` independent renormalized products of length
// `cells`.  The growth rate does not depend on the norm; the choice only
// sets the final readout.
LyapunovEstimate lyapunov_estimate(const FadingModel& model_a, const FadingModel& model_b,
                                   double lambda, std::uint64_t cells, std::uint64_t reps,
                                   std::uint64_t seed, MatrixNorm norm = MatrixNorm::Spectral,
                                   unsigned threads = 0);

struct UpperBoundEstimate {
  double bound = 0.0;  // (1/k) E log ||g_k ... g_1||, spectral norm
  double se = 0.0;
  std::uint32_t window = 0;  // k
  std::uint64_t trials = 0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

// Finite-window upper bound on the Lyapunov exponent: submultiplicativity
// gives gamma <= (1/k) E log ||g_k ... g_1|| for every k, nonincreasing in k
// along doubling and converging to gamma.
UpperBoundEstimate lyapunov_upper_bound(const FadingModel& model_a, const FadingModel& model_b,
                                        double lambda, std::uint32_t window,
                                        std::uint64_t trials, std::uint64_t seed,
                                        unsigned threads = 0);

}  // namespace softcell
