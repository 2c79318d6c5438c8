#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "softcell/constants.hpp"
#include "softcell/fading.hpp"
#include "softcell/markov.hpp"
#include "softcell/rng.hpp"

using softcell::ChainStart;
using softcell::e_step;
using softcell::EChainConfig;
using softcell::FadingModel;
using softcell::kEulerGamma;
using softcell::kLn2;
using softcell::offset_ladder;
using softcell::OffsetBoundLadder;
using softcell::Rng;
using softcell::run_chain;
using softcell::sin_sq;
using softcell::unit_interval_step;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

std::vector<std::complex<double>> vec(std::initializer_list<std::complex<double>> xs) {
  return xs;
}

}  // namespace

TEST_CASE("sin_sq on canonical pairs") {
  const auto e0 = vec({{1.0, 0.0}, {0.0, 0.0}});
  const auto e1 = vec({{0.0, 0.0}, {1.0, 0.0}});
  CHECK(sin_sq(e0, e1) == 1.0);
  CHECK(sin_sq(e0, e0) == 0.0);
  // Scalars are collinear by definition.
  CHECK(sin_sq(vec({{3.0, -2.0}}), vec({{-1.0, 5.0}})) == 0.0);
  // A global complex phase does not move the angle.
  const auto rot = vec({{0.0, 2.0}, {0.0, 0.0}});
  CHECK(sin_sq(rot, e1) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(sin_sq(rot, e0) == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("sin_sq input validation") {
  const auto one = vec({{1.0, 0.0}});
  const auto two = vec({{1.0, 0.0}, {0.0, 1.0}});
  const auto zero = vec({{0.0, 0.0}});
  CHECK_THROWS(sin_sq(one, two));
  CHECK_THROWS(sin_sq({}, {}));
  CHECK_THROWS(sin_sq(one, zero));
}

TEST_CASE("chain step special points") {
  const auto a = vec({{2.0, 0.0}});
  const auto b = vec({{1.0, 0.0}});
  // e = +infinity steps to delta + |a|^2.
  CHECK(e_step(kInf, a, b, 0.5) == doctest::Approx(4.5).epsilon(1e-15));
  // e = 0 with delta = 0 is absorbing for scalar groups.
  CHECK(e_step(0.0, a, b, 0.0) == 0.0);
  // Scalar identity: e' = delta + |a|^2 e / (e + |b|^2).
  const double e = 0.7;
  CHECK(e_step(e, a, b, 0.25) ==
        doctest::Approx(0.25 + 4.0 * e / (e + 1.0)).epsilon(1e-15));
  CHECK_THROWS(e_step(-1.0, a, b, 0.0));
  CHECK_THROWS(e_step(1.0, a, b, -0.1));
}

TEST_CASE("chain step is monotone in the state") {
  Rng rng(83, 0);
  const FadingModel model = FadingModel::rayleigh();
  std::vector<std::complex<double>> a(3);
  std::vector<std::complex<double>> b(3);
  for (int i = 0; i < 1000; ++i) {
    for (auto& g : a) g = model.sample_gain(rng);
    for (auto& g : b) g = model.sample_gain(rng);
    const double lo = 2.0 * rng.next_double();
    const double hi = lo + 3.0 * rng.next_double();
    const double delta = 0.5 * rng.next_double();
    CHECK(e_step(lo, a, b, delta) <= e_step(hi, a, b, delta) + 1e-12);
    // Every finite state stays below the step from infinity.
    CHECK(e_step(hi, a, b, delta) <= e_step(kInf, a, b, delta) + 1e-12);
  }
}

TEST_CASE("unit interval form stays inside (0, 1)") {
  CHECK(unit_interval_step(0.0, 1.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-15));
  Rng rng(84, 0);
  for (int i = 0; i < 1000; ++i) {
    const double e = rng.next_double();
    const double a_sq = -std::log(rng.next_double() + 1e-300);
    const double b_sq = -std::log(rng.next_double() + 1e-300);
    const double out = unit_interval_step(e, a_sq, b_sq, 1.0);
    CHECK(out > 0.0);
    CHECK(out < 1.0);
  }
  CHECK_THROWS(unit_interval_step(0.0, 1.0, 0.0, 0.0));
}

TEST_CASE("run_chain records the trajectory it returns") {
  const EChainConfig config{.model_a = FadingModel::rayleigh(),
                            .model_b = FadingModel::rayleigh(),
                            .users = 2,
                            .delta = 0.1,
                            .start = ChainStart::Value,
                            .start_value = 1.5};

  Rng rng(7, 0);
  std::vector<double> trajectory;
  const double last = run_chain(config, 25, rng, &trajectory);
  REQUIRE(trajectory.size() == 25);
  CHECK(trajectory.back() == last);

  // Replay by hand: each step draws the b row first, then the a row.
  Rng replay(7, 0);
  double e = 1.5;
  std::vector<std::complex<double>> a(2);
  std::vector<std::complex<double>> b(2);
  for (int i = 0; i < 25; ++i) {
    for (auto& g : b) g = config.model_b.sample_gain(replay);
    for (auto& g : a) g = config.model_a.sample_gain(replay);
    e = e_step(e, a, b, 0.1);
    CHECK(trajectory[static_cast<std::size_t>(i)] == e);
  }
}

TEST_CASE("zero start with zero shift is absorbing for scalar groups") {
  const EChainConfig config{.model_a = FadingModel::rayleigh(),
                            .model_b = FadingModel::rayleigh(),
                            .users = 1,
                            .start = ChainStart::Zero};
  Rng rng(9, 0);
  CHECK(run_chain(config, 100, rng) == 0.0);
}

TEST_CASE("coupled ladder brackets monotonically at every order") {
  const FadingModel ray = FadingModel::rayleigh();
  const OffsetBoundLadder ladder = offset_ladder(ray, ray, 2, 6, 500, 3, true);
  REQUIRE(ladder.entries.size() == 6);
  CHECK(ladder.users == 2);
  CHECK(ladder.trials == 500);
  CHECK(ladder.coupled);
  for (std::size_t i = 0; i < 6; ++i) {
    const auto& e = ladder.entries[i];
    CHECK(e.order == i + 1);
    CHECK(e.lower_nats <= e.upper_nats);
    CHECK(e.lower_se > 0.0);
    CHECK(e.upper_se > 0.0);
    if (i > 0) {
      CHECK(e.lower_nats >= ladder.entries[i - 1].lower_nats);
      CHECK(e.upper_nats <= ladder.entries[i - 1].upper_nats);
      CHECK(e.lower_step_se > 0.0);
    }
  }
  // The bit-domain fields swap the roles: the offset's lower bound is the
  // power offset's upper bound.
  for (const auto& e : ladder.entries) {
    CHECK(e.l_inf_upper_bits == -e.lower_nats / kLn2);
    CHECK(e.l_inf_lower_bits == -e.upper_nats / kLn2);
    CHECK(e.l_inf_upper_se_bits == e.lower_se / kLn2);
  }
}

TEST_CASE("uncoupled ladder converges to the same place") {
  const FadingModel ray = FadingModel::rayleigh();
  const auto coupled = offset_ladder(ray, ray, 2, 6, 4000, 11, true);
  const auto uncoupled = offset_ladder(ray, ray, 2, 6, 4000, 11, false);
  CHECK_FALSE(uncoupled.coupled);
  const auto& c = coupled.entries.back();
  const auto& u = uncoupled.entries.back();
  const double sigma = std::hypot(c.lower_se, u.lower_se);
  CHECK(std::abs(c.lower_nats - u.lower_nats) < 5.0 * sigma);
  // Coupling exists to shrink the bracket variance.
  CHECK(c.gap_se < u.gap_se);
}

TEST_CASE("ladder results do not depend on the thread count") {
  const FadingModel ray = FadingModel::rayleigh();
  const auto one = offset_ladder(ray, ray, 2, 4, 600, 5, true, 1);
  const auto four = offset_ladder(ray, ray, 2, 4, 600, 5, true, 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(one.entries[i].lower_nats == four.entries[i].lower_nats);
    CHECK(one.entries[i].upper_nats == four.entries[i].upper_nats);
    CHECK(one.entries[i].lower_se == four.entries[i].lower_se);
  }
}

TEST_CASE("order-one rungs against the exponential log-moments") {
  // For a single-user group the order-1 scores are log-moments of |gain|^2
  // draws: lower = E log Exp(1) = -gamma, upper = E log Gamma(2,1) = 1 - gamma.
  const FadingModel ray = FadingModel::rayleigh();
  const auto ladder = offset_ladder(ray, ray, 1, 1, 40000, 21, true);
  const auto& rung = ladder.entries[0];
  CHECK(std::abs(rung.lower_nats - (-kEulerGamma)) < 4.0 * rung.lower_se);
  CHECK(std::abs(rung.upper_nats - (1.0 - kEulerGamma)) < 4.0 * rung.upper_se);
}

TEST_CASE("stationary chain agrees with the deep ladder") {
  const FadingModel ray = FadingModel::rayleigh();
  const auto fixed = softcell::stationary_offset(ray, ray, 1, 2000, 60000, 31);
  CHECK(fixed.burn_in == 2000);
  CHECK(fixed.samples == 60000);
  CHECK(fixed.se_nats > 0.0);
  CHECK(fixed.l_inf_bits == -fixed.offset_nats / kLn2);
  // Single-user stationary offset is exactly -gamma in the limit.
  CHECK(std::abs(fixed.offset_nats - (-kEulerGamma)) < 5.0 * fixed.se_nats);
}

TEST_CASE("time-sharing offset is exact for closed-form laws") {
  const FadingModel ray = FadingModel::rayleigh();
  const auto offset = softcell::high_snr_offset_tdma(ray, ray);
  CHECK(offset.offset_nats == -kEulerGamma);
  CHECK(offset.se_nats == 0.0);
  CHECK(offset.l_inf_bits == kEulerGamma / kLn2);

  const FadingModel flat = FadingModel::nonfading();
  CHECK(softcell::high_snr_offset_tdma(flat, flat).offset_nats == 0.0);
  // Asymmetric pair: the larger log-moment wins.
  CHECK(softcell::high_snr_offset_tdma(ray, flat).offset_nats == 0.0);
  const FadingModel twice = FadingModel::scaled_rayleigh(2.0);
  CHECK(softcell::high_snr_offset_tdma(twice, ray).offset_nats ==
        doctest::Approx(2.0 * std::log(2.0) - kEulerGamma).epsilon(1e-15));
}

TEST_CASE("time-sharing offset rejects laws without log moments") {
  const FadingModel bad = FadingModel::empirical({{0.0, 0.0}, {1.0, 0.0}});
  CHECK_THROWS_AS(softcell::high_snr_offset_tdma(bad, bad), std::domain_error);
}

TEST_CASE("ladder argument validation") {
  const FadingModel ray = FadingModel::rayleigh();
  CHECK_THROWS(offset_ladder(ray, ray, 0, 2, 100, 1));
  CHECK_THROWS(offset_ladder(ray, ray, 1, 0, 100, 1));
  CHECK_THROWS(offset_ladder(ray, ray, 1, 2, 1, 1));
}
