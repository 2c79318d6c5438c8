#include "softcell/closedform.hpp"

#include <cmath>
#include <stdexcept>

#include "softcell/channel.hpp"
#include "softcell/check.hpp"
#include "softcell/constants.hpp"
#include "softcell/quadrature.hpp"

namespace softcell {
namespace {

double e1_series(double x) {
  double sum = -kEulerGamma - std::log(x);
  double power_term = 1.0;  // x^k / k!
  for (int k = 1; k <= 40; ++k) {
    power_term *= x / k;
    const double add = (k % 2 == 1 ? power_term : -power_term) / k;
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Continued fraction e^x E1(x) = 1/(x+1-) 1^2/(x+3-) 2^2/(x+5-) ..., by the
// modified Lentz method.
double e1_scaled_continued_fraction(double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double f = d;
  for (int i = 1; i <= 300; ++i) {
    const double a = -static_cast<double>(i) * static_cast<double>(i);
    b += 2.0;
    d = b + a * d;
    if (std::abs(d) < tiny) d = tiny;
    c = b + a / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = c * d;
    f *= delta;
    if (std::abs(delta - 1.0) < 1e-16) return f;
  }
  throw std::runtime_error("exponential integral continued fraction failed to converge");
}

void require_moment_pair(std::complex<double> m1, double m2) {
  require(std::isfinite(m2) && m2 > 0.0, "second moment must be positive");
  require(std::isfinite(m1.real()) && std::isfinite(m1.imag()), "mean must be finite");
  require(std::norm(m1) <= m2 * (1.0 + 1e-12),
          "inconsistent moments: |m1|^2 exceeds m2");
}

}  // namespace

double rate_nonfading(double power) {
  require(std::isfinite(power) && power >= 0.0, "power must be finite and non-negative");
  return std::log(0.5 * (1.0 + 2.0 * power + std::sqrt(1.0 + 4.0 * power)));
}

double exp_integral_e1(double x) {
  require(std::isfinite(x) && x > 0.0, "E1 requires x > 0");
  if (x <= 1.0) return e1_series(x);
  return std::exp(-x) * e1_scaled_continued_fraction(x);
}

double exp_scaled_e1(double x) {
  require(std::isfinite(x) && x > 0.0, "E1 requires x > 0");
  if (x <= 1.0) return std::exp(x) * e1_series(x);
  return e1_scaled_continued_fraction(x);
}

double narula_density(double x, double power) {
  require(std::isfinite(power) && power > 0.0, "power must be positive");
  if (!(x >= 1.0)) return 0.0;
  // log(x) e^{-x/P} / (E1(1/P) P), written with the exponent shifted to the
  // left edge so that small powers cannot underflow the normalization.
  const double scaled_norm = power * exp_scaled_e1(1.0 / power);
  return std::log(x) * std::exp(-(x - 1.0) / power) / scaled_norm;
}

double rate_tdma_rayleigh(double power, double abs_tol) {
  require(std::isfinite(power) && power > 0.0, "power must be positive");
  require(std::isfinite(abs_tol) && abs_tol > 0.0, "tolerance must be positive");
  const double scaled_norm = power * exp_scaled_e1(1.0 / power);

  // Truncate the upper limit where the tail is provably negligible: for
  // x >= 1, (log x)^2 <= x, so the tail beyond X is at most
  // int_X^inf x e^{-(x-1)/P} dx = P (X + P) e^{-(X-1)/P}.
  const double cutoff_scale = 45.0 + 2.0 * std::log1p(power);
  const double upper = 1.0 + cutoff_scale * power;
  const double budget = 0.5 * abs_tol * scaled_norm;
  const double tail = power * (upper + power) * std::exp(-cutoff_scale);
  require(tail <= budget, "tail bound exceeds the tolerance budget");

  const auto integrand = [power](double x) {
    const double lx = std::log(x);
    return lx * lx * std::exp(-(x - 1.0) / power);
  };
  const QuadratureResult integral = integrate_gk(integrand, 1.0, upper, budget);
  return integral.value / scaled_norm;
}

double rate_wb_large_users(double power, std::complex<double> m1, double m2) {
  require(std::isfinite(power) && power >= 0.0, "power must be finite and non-negative");
  require_moment_pair(m1, m2);
  const double spread = m2 * m2 - std::norm(m1) * std::norm(m1);
  const double disc = 1.0 + 4.0 * power * m2 + 4.0 * power * power * spread;
  return std::log(0.5 * (1.0 + 2.0 * power * m2 + std::sqrt(disc)));
}

DetRecursionParams det_recursion_params(double power, std::size_t users,
                                        std::complex<double> m1, double m2) {
  require(users >= 1, "need at least one user per group");
  require(std::isfinite(power) && power >= 0.0, "power must be finite and non-negative");
  require_moment_pair(m1, m2);
  const double k = static_cast<double>(users);
  const double m1_4 = std::norm(m1) * std::norm(m1);
  DetRecursionParams p;
  p.a_coef = 1.0 + 2.0 * power * m2;
  p.b_coef = (power * power / k) * (m2 * m2 + (k - 1.0) * m1_4);
  // a^2 - 4b rearranged so that it stays >= 1 without cancellation.
  const double disc =
      1.0 + 4.0 * power * m2 + 4.0 * power * power * (1.0 - 1.0 / k) * (m2 * m2 - m1_4);
  const double root = std::sqrt(disc);
  p.r = 0.5 * (p.a_coef + root);
  p.s = p.b_coef / p.r;
  p.phi = p.r / root;
  p.varphi = p.s / root;
  return p;
}

std::vector<double> expected_det_sequence(std::size_t cells, double power, std::size_t users,
                                          std::complex<double> m1, double m2) {
  require(cells >= 1, "need at least one cell");
  const DetRecursionParams p = det_recursion_params(power, users, m1, m2);
  const double log_r = std::log(p.r);
  const double ratio = p.s / p.r;  // in [0, 1)
  std::vector<double> log_expected(cells);
  double ratio_pow = 1.0;
  for (std::size_t m = 1; m <= cells; ++m) {
    ratio_pow *= ratio;
    // E det G_m = phi r^m - varphi s^m = r^m (phi - varphi (s/r)^m), and
    // phi - varphi q >= 1 for q in [0, 1], so the log never degenerates.
    log_expected[m - 1] = static_cast<double>(m) * log_r + std::log(p.phi - p.varphi * ratio_pow);
  }
  return log_expected;
}

double rate_wb_upper(double power, std::size_t users, std::complex<double> m1, double m2) {
  return std::log(det_recursion_params(power, users, m1, m2).r);
}

LowSnrPair extreme_low_snr_analytic(const FadingModel& model_a, const FadingModel& model_b,
                                    std::size_t users) {
  require(users >= 1, "need at least one user per group");
  require(model_a.spec() == model_b.spec(),
          "analytic low-SNR parameters assume both groups follow the same law");
  const MomentSummary m = model_a.moments();
  require(std::isfinite(m.m4) && m.m4 > 0.0, "fourth moment must be finite and positive");
  const double k = static_cast<double>(users);
  const double m1_4 = std::norm(m.m1) * std::norm(m.m1);
  LowSnrPair out;
  out.ebno_min = kLn2 / (2.0 * m.m2);
  out.s0 = 2.0 / (m.kurtosis / (2.0 * k) + m1_4 / (2.0 * m.m2 * m.m2) + 1.0);
  return out;
}

LowSnrPair extreme_low_snr_empirical(const FadingModel& model_a, const FadingModel& model_b,
                                     std::size_t users, std::size_t cells, std::uint64_t seed) {
  require(cells >= 2, "trace estimates need at least two cells");
  Rng rng(seed, 0);
  const ChannelRealization ch = sample_channel(model_a, model_b, cells, users, rng);
  double t1 = 0.0;
  double t2 = 0.0;
  for (std::size_t m = 0; m < cells; ++m) {
    const double row_power = sq_norm(ch.a_row(m)) + sq_norm(ch.b_row(m));
    t1 += row_power;
    t2 += row_power * row_power;
  }
  for (std::size_t m = 0; m + 1 < cells; ++m) {
    t2 += 2.0 * std::norm(inner(ch.a_row(m + 1), ch.b_row(m)));
  }
  const double mk = static_cast<double>(cells) * static_cast<double>(users);
  LowSnrPair out;
  out.ebno_min = mk * kLn2 / t1;
  out.s0 = 2.0 * t1 * t1 / (static_cast<double>(cells) * t2);
  return out;
}

SnrCharacterization nonfading_snr_characterization() {
  SnrCharacterization c;
  c.s0 = 4.0 / 3.0;
  c.ebno_min = kLn2 / 2.0;
  c.s_inf = 1.0;
  c.l_inf_lower_bits = 0.0;
  c.l_inf_upper_bits = 0.0;
  return c;
}

SnrCharacterization rayleigh_wb_snr_characterization(std::size_t users) {
  require(users >= 1, "need at least one user per group");
  const double k = static_cast<double>(users);
  SnrCharacterization c;
  c.s0 = 2.0 / (1.0 + 1.0 / k);
  c.ebno_min = kLn2 / 2.0;
  c.s_inf = 1.0;
  c.l_inf_lower_bits = -std::log2(1.0 + std::sqrt(1.0 - 1.0 / k));
  c.l_inf_upper_bits = kEulerGamma / kLn2;
  return c;
}

}  // namespace softcell
