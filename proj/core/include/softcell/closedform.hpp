#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "softcell/fading.hpp"

namespace softcell {

// Per-cell rate of the unfaded single-user-per-group uplink as the number of
// cells grows, log((1 + 2P + sqrt(1 + 4P)) / 2) nats.
double rate_nonfading(double power);

// Exponential integral E1(x) = int_x^inf e^{-t}/t dt for x > 0: power series
// up to x = 1, modified Lentz continued fraction beyond.
double exp_integral_e1(double x);

// e^x E1(x), stable for large x (no exponential underflow).
double exp_scaled_e1(double x);

// Stationary density of the single-user Rayleigh pivot chain,
// log(x) e^{-x/P} / (E1(1/P) P) on [1, inf), zero below 1.
double narula_density(double x, double power);

// Exact large-system single-user Rayleigh rate: the mean of log(x) under the
// stationary pivot density, by adaptive quadrature on a truncated domain with
// a proven tail bound.
double rate_tdma_rayleigh(double power, double abs_tol = 1e-9);

// Large-group-size limit of the simultaneous-transmission rate for a fading
// law with mean m1 and power m2.
double rate_wb_large_users(double power, std::complex<double> m1, double m2);

// Constants of the two-term recursion satisfied by E det G_m:
//   E det G_m = a_coef E det G_{m-1} - b_coef E det G_{m-2},
// with characteristic roots r > s >= 0 and E det G_m = phi r^m - varphi s^m.
// The discriminant a^2 - 4b equals 1 + 4Pm2 + 4P^2(1-1/K)(m2^2 - |m1|^4),
// which is >= 1 for every admissible moment pair (|m1|^2 <= m2), so the
// roots are always real and well separated.
struct DetRecursionParams {
  double a_coef = 0.0;
  double b_coef = 0.0;
  double r = 0.0;
  double s = 0.0;
  double phi = 0.0;
  double varphi = 0.0;
};

DetRecursionParams det_recursion_params(double power, std::size_t users,
                                        std::complex<double> m1, double m2);

// log E det G_m for m = 1..cells, in closed form.
std::vector<double> expected_det_sequence(std::size_t cells, double power, std::size_t users,
                                          std::complex<double> m1, double m2);

// Jensen upper bound on the large-system simultaneous-transmission rate with
// a finite group size: log r of the determinant recursion.
double rate_wb_upper(double power, std::size_t users, std::complex<double> m1, double m2);

struct LowSnrPair {
  double ebno_min = 0.0;  // minimal energy per bit over noise (linear scale)
  double s0 = 0.0;        // low-SNR slope, bits per 3 dB
};

// Low-SNR parameters from fading moments (both groups must follow the same
// law; the expression assumes symmetric statistics):
//   Eb/N0_min = log(2) / (2 m2),   S0 = 2 / (kurt/(2K) + |m1|^4/(2 m2^2) + 1).
LowSnrPair extreme_low_snr_analytic(const FadingModel& model_a, const FadingModel& model_b,
                                    std::size_t users);

// The same parameters from the traces of a single drawn channel:
//   Eb/N0_min = M K log(2) / t1,   S0 = (2/M) t1^2 / t2,
// with t1 = tr(H H^dagger) and t2 = tr((H H^dagger)^2).
LowSnrPair extreme_low_snr_empirical(const FadingModel& model_a, const FadingModel& model_b,
                                     std::size_t users, std::size_t cells, std::uint64_t seed);

// Extreme-SNR summary of the large-system rate: low-SNR parameters plus the
// high-SNR slope and the known bracket for the high-SNR power offset (bits);
// lower == upper when the offset is known exactly.
struct SnrCharacterization {
  double s0 = 0.0;
  double ebno_min = 0.0;
  double s_inf = 0.0;
  double l_inf_lower_bits = 0.0;
  double l_inf_upper_bits = 0.0;
};

SnrCharacterization nonfading_snr_characterization();
SnrCharacterization rayleigh_wb_snr_characterization(std::size_t users);

}  // namespace softcell
