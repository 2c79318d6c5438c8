#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "softcell/channel.hpp"
#include "softcell/closedform.hpp"
#include "softcell/constants.hpp"
#include "softcell/fading.hpp"
#include "softcell/rng.hpp"
#include "support/oracles.hpp"

using softcell::det_recursion_params;
using softcell::DetRecursionParams;
using softcell::exp_integral_e1;
using softcell::exp_scaled_e1;
using softcell::expected_det_sequence;
using softcell::FadingModel;
using softcell::kEulerGamma;
using softcell::kLn2;
using softcell::LowSnrPair;
using softcell::narula_density;
using softcell::rate_nonfading;
using softcell::rate_tdma_rayleigh;
using softcell::rate_wb_large_users;
using softcell::rate_wb_upper;

namespace {

// Reference values computed once with 30-digit arithmetic and frozen.
struct Frozen {
  double x;
  double value;
};

constexpr Frozen kE1[] = {
    {0.1, 1.8229239584193907},  {0.5, 0.5597735947761608},
    {1.0, 0.21938393439552027}, {2.0, 0.04890051070806112},
    {5.0, 0.0011482955912753258}, {10.0, 4.156968929685324e-06},
    {30.0, 3.0215520106888125e-15},
};

constexpr Frozen kTdmaRate[] = {
    {1.0, 0.89198142504156034},
    {10.0, 2.4270333312678005},
    {100.0, 4.4204279236360212},
    {1e6, 13.362549467960022},
};

}  // namespace

TEST_CASE("non-fading rate formula special values") {
  // P = 2 makes the surd rational: (1 + 4 + 3)/2 = 4.
  CHECK(rate_nonfading(2.0) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
  CHECK(rate_nonfading(0.0) == 0.0);
  for (const double p : {1e-3, 0.1, 1.0, 42.0, 1e8}) {
    const double direct = std::log(0.5 * (1.0 + 2.0 * p + std::sqrt(1.0 + 4.0 * p)));
    CHECK(rate_nonfading(p) == doctest::Approx(direct).epsilon(1e-15));
  }
}

TEST_CASE("exponential integral against frozen references") {
  // Ratio form: values span fifteen decades, so a plain Approx would drown
  // the small ones in its absolute floor.
  for (const Frozen& f : kE1) {
    CAPTURE(f.x);
    CHECK(exp_integral_e1(f.x) / f.value == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("exponential integral against quadrature") {
  for (const double x : {0.25, 1.0, 3.0, 8.0}) {
    CAPTURE(x);
    CHECK(exp_integral_e1(x) / oracles::e1_quadrature(x) ==
          doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("scaled exponential integral stays finite where e^x overflows") {
  for (const double x : {0.5, 1.0, 20.0}) {
    CHECK(exp_scaled_e1(x) / (std::exp(x) * exp_integral_e1(x)) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
  const double huge = exp_scaled_e1(1e4);
  // Asymptotics e^x E1(x) = (1 - 1/x + 2/x^2 - ...)/x.
  const double asymptotic = (1.0 - 1e-4 + 2e-8) / 1e4;
  CHECK(std::isfinite(huge));
  CHECK(huge / asymptotic == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("stationary pivot density integrates to one") {
  for (const double p : {0.5, 1.0, 10.0}) {
    CAPTURE(p);
    const double mass = oracles::adaptive_simpson(
        [p](double x) { return narula_density(x, p); }, 1.0, 1.0 + 80.0 * p, 1e-11);
    CHECK(mass == doctest::Approx(1.0).epsilon(1e-7));
  }
  CHECK(narula_density(0.999, 1.0) == 0.0);
  CHECK(narula_density(1.0, 1.0) == 0.0);  // log(1) = 0 at the left edge
}

TEST_CASE("single-user fading rate against frozen references") {
  for (const Frozen& f : kTdmaRate) {
    CAPTURE(f.x);
    CHECK(rate_tdma_rayleigh(f.x) == doctest::Approx(f.value).epsilon(1e-10));
  }
}

TEST_CASE("single-user fading rate is increasing and below the unfaded rate") {
  double prev = 0.0;
  for (const double p : {0.1, 0.5, 1.0, 5.0, 20.0, 200.0}) {
    const double rate = rate_tdma_rayleigh(p);
    CHECK(rate > prev);
    CHECK(rate < rate_nonfading(p));  // Jensen: fading can only hurt here
    prev = rate;
  }
}

TEST_CASE("determinant recursion roots satisfy the characteristic identities") {
  softcell::Rng rng(55, 0);
  for (int i = 0; i < 200; ++i) {
    const double power = 0.05 * std::pow(10.0, 3.0 * rng.next_double());
    const std::size_t users = 1 + rng.next_index(6);
    const double m2 = 0.2 + 2.0 * rng.next_double();
    // |m1|^2 <= m2 keeps the pair admissible.
    const double mag = std::sqrt(m2 * rng.next_double());
    const double phase = 6.283185307179586 * rng.next_double();
    const std::complex<double> m1 = std::polar(mag, phase);
    const DetRecursionParams p = det_recursion_params(power, users, m1, m2);
    CAPTURE(power);
    CAPTURE(users);
    CHECK(p.r + p.s == doctest::Approx(p.a_coef).epsilon(1e-12));
    CHECK(p.r * p.s == doctest::Approx(p.b_coef).epsilon(1e-10));
    CHECK(p.r > p.s);
    CHECK(p.s >= 0.0);
    // Discriminant >= 1 for admissible moments: the roots never collide.
    CHECK(p.a_coef * p.a_coef - 4.0 * p.b_coef >= 1.0 - 1e-12);
  }
}

TEST_CASE("closed-form determinant sequence matches the direct recursion") {
  const double power = 3.0;
  const std::size_t users = 2;
  const std::complex<double> m1{0.0, 0.0};
  const double m2 = 1.0;
  const std::size_t cells = 40;
  const DetRecursionParams p = det_recursion_params(power, users, m1, m2);

  // Direct two-term recursion in extended precision.  The seed values are
  // elementary: det G_0 = 1 and E det G_1 = E diag = 1 + 2 rho K m2.
  const double rho = power / static_cast<double>(users);
  std::vector<long double> dets(cells + 1);
  dets[0] = 1.0L;
  dets[1] = 1.0L + 2.0L * static_cast<long double>(rho) * users * m2;
  for (std::size_t m = 2; m <= cells; ++m) {
    dets[m] = static_cast<long double>(p.a_coef) * dets[m - 1] -
              static_cast<long double>(p.b_coef) * dets[m - 2];
  }

  const std::vector<double> got = expected_det_sequence(cells, power, users, m1, m2);
  REQUIRE(got.size() == cells);
  for (std::size_t m = 1; m <= cells; ++m) {
    CAPTURE(m);
    const double want = static_cast<double>(std::log(dets[m]));
    CHECK(got[m - 1] == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("determinant sequence matches a small Monte Carlo average") {
  const double power = 1.0;
  const std::size_t users = 2;
  const std::size_t cells = 4;
  const FadingModel model = FadingModel::rayleigh();
  const std::vector<double> expected = expected_det_sequence(cells, power, users, {0.0, 0.0}, 1.0);

  const std::uint64_t trials = 20000;
  std::vector<double> sums(cells, 0.0);
  std::vector<double> sq(cells, 0.0);
  for (std::uint64_t t = 0; t < trials; ++t) {
    softcell::Rng rng(321, t);
    const auto ch = softcell::sample_channel(model, model, cells, users, rng);
    const auto g = softcell::gram_tridiagonal(ch, power / static_cast<double>(users));
    // Leading principal minors by the three-term recursion, in plain form.
    double prev = 1.0;
    double cur = g.diag[0];
    for (std::size_t m = 0; m < cells; ++m) {
      if (m > 0) {
        const double next = g.diag[m] * cur - std::norm(g.offdiag[m - 1]) * prev;
        prev = cur;
        cur = next;
      }
      sums[m] += cur;
      sq[m] += cur * cur;
    }
  }
  for (std::size_t m = 0; m < cells; ++m) {
    CAPTURE(m);
    const double n = static_cast<double>(trials);
    const double mean = sums[m] / n;
    const double se = std::sqrt((sq[m] / n - mean * mean) / n);
    CHECK(std::abs(mean - std::exp(expected[m])) < 4.0 * se);
  }
}

TEST_CASE("group size one collapses the upper bound to the unfaded rate") {
  for (const double p : {1e-3, 0.1, 1.0, 10.0, 1e4}) {
    CAPTURE(p);
    CHECK(rate_wb_upper(p, 1, {0.0, 0.0}, 1.0) ==
          doctest::Approx(rate_nonfading(p)).epsilon(1e-14));
  }
}

TEST_CASE("large-group limit is approached from below by the upper bound roots") {
  const double p = 10.0;
  const std::complex<double> m1{0.0, 0.0};
  const double limit = rate_wb_large_users(p, m1, 1.0);
  double prev = 0.0;
  for (const std::size_t k : {1, 2, 4, 16, 256}) {
    const double bound = rate_wb_upper(p, k, m1, 1.0);
    CHECK(bound > prev);
    prev = bound;
  }
  CHECK(std::abs(rate_wb_upper(p, 100000, m1, 1.0) - limit) < 1e-3);
}

TEST_CASE("analytic low-snr parameters in closed form") {
  const FadingModel ray = FadingModel::rayleigh();
  for (const std::size_t k : {1, 2, 10, 50}) {
    CAPTURE(k);
    const LowSnrPair pair = softcell::extreme_low_snr_analytic(ray, ray, k);
    CHECK(pair.ebno_min == kLn2 / 2.0);
    CHECK(pair.s0 == 2.0 / (1.0 + 1.0 / static_cast<double>(k)));
  }
  const FadingModel flat = FadingModel::nonfading();
  const LowSnrPair unfaded = softcell::extreme_low_snr_analytic(flat, flat, 1);
  CHECK(unfaded.ebno_min == doctest::Approx(kLn2 / 2.0).epsilon(1e-15));
  CHECK(unfaded.s0 == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("trace-based low-snr parameters approach the analytic pair") {
  const FadingModel ray = FadingModel::rayleigh();
  const LowSnrPair analytic = softcell::extreme_low_snr_analytic(ray, ray, 2);
  const LowSnrPair traced = softcell::extreme_low_snr_empirical(ray, ray, 2, 4000, 77);
  CHECK(std::abs(traced.ebno_min / analytic.ebno_min - 1.0) < 0.05);
  CHECK(std::abs(traced.s0 / analytic.s0 - 1.0) < 0.05);
}

TEST_CASE("extreme-snr characterizations") {
  const auto flat = softcell::nonfading_snr_characterization();
  // The unfaded curve is C(P) = 2P - 3P^2 + O(P^3), so the low-SNR slope is
  // 2 C'(0)^2 / (-C''(0)) = 4/3.  Confirm by finite differences on the rate.
  CHECK(flat.s0 == 4.0 / 3.0);
  const double h = 1e-5;
  const double c1 = (rate_nonfading(h) - rate_nonfading(0.0)) / h;
  const double c2 =
      (rate_nonfading(2.0 * h) - 2.0 * rate_nonfading(h) + rate_nonfading(0.0)) / (h * h);
  CHECK(2.0 * c1 * c1 / (-c2) == doctest::Approx(flat.s0).epsilon(1e-3));
  CHECK(flat.ebno_min == doctest::Approx(kLn2 / 2.0).epsilon(1e-15));
  CHECK(flat.s_inf == 1.0);
  CHECK(flat.l_inf_lower_bits == 0.0);
  CHECK(flat.l_inf_upper_bits == 0.0);

  for (const std::size_t k : {2, 10, 50}) {
    CAPTURE(k);
    const auto ray = softcell::rayleigh_wb_snr_characterization(k);
    CHECK(ray.s0 == 2.0 / (1.0 + 1.0 / static_cast<double>(k)));
    CHECK(ray.ebno_min == kLn2 / 2.0);
    CHECK(ray.s_inf == 1.0);
    const double sqrt_bound =
        -std::log2(1.0 + std::sqrt(1.0 - 1.0 / static_cast<double>(k)));
    CHECK(ray.l_inf_lower_bits == doctest::Approx(sqrt_bound).epsilon(1e-14));
    CHECK(ray.l_inf_upper_bits == doctest::Approx(kEulerGamma / kLn2).epsilon(1e-14));
    CHECK(ray.l_inf_lower_bits < ray.l_inf_upper_bits);
  }
}

TEST_CASE("quadrature tolerance propagates") {
  const double loose = rate_tdma_rayleigh(10.0, 1e-4);
  const double tight = rate_tdma_rayleigh(10.0, 1e-12);
  CHECK(std::abs(loose - tight) < 1e-4);
  CHECK_THROWS(rate_tdma_rayleigh(-1.0));
}
