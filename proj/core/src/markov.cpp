#include "softcell/markov.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "softcell/channel.hpp"
#include "softcell/constants.hpp"
#include "softcell/parallel.hpp"
#include "softcell/statistics.hpp"

namespace softcell {

namespace {

// A drawn (a, b) group pair reduced to the three scalars the chain reads.
struct StepScalars {
  double a_sq = 0.0;
  double b_sq = 0.0;
  double angle = 0.0;  // sin^2 of the angle between the rows
};

double scalar_e_step(double e, const StepScalars& s, double delta) {
  if (std::isinf(e)) return delta + s.a_sq;
  const double denom = e + s.b_sq;
  if (denom == 0.0) return delta + s.a_sq;
  return delta + s.a_sq * (e + s.b_sq * s.angle) / denom;
}

void draw_row(const FadingModel& model, Rng& rng, std::vector<std::complex<double>>& row) {
  for (auto& gain : row) gain = model.sample_gain(rng);
}

StepScalars reduce_pair(std::span<const std::complex<double>> a,
                        std::span<const std::complex<double>> b) {
  StepScalars s;
  s.a_sq = sq_norm(a);
  s.b_sq = sq_norm(b);
  s.angle = (s.a_sq > 0.0 && s.b_sq > 0.0) ? sin_sq(a, b) : 0.0;
  return s;
}

void require_state(double e, const char* where) {
  if (std::isnan(e) || e < 0.0) {
    throw std::invalid_argument(std::string(where) + ": chain state must be >= 0");
  }
}

}  // namespace

double sin_sq(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b) {
  if (a.size() != b.size()) throw std::invalid_argument("sin_sq: length mismatch");
  if (a.empty()) throw std::invalid_argument("sin_sq: empty vectors");
  const double na = sq_norm(a);
  const double nb = sq_norm(b);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("sin_sq: zero vector");
  if (a.size() == 1) return 0.0;
  double s = 1.0 - std::norm(inner(a, b)) / (na * nb);
  if (s < 0.0) s = 0.0;
  if (s > 1.0) s = 1.0;
  return s;
}

double e_step(double e, std::span<const std::complex<double>> a,
              std::span<const std::complex<double>> b, double delta) {
  require_state(e, "e_step");
  if (delta < 0.0) throw std::invalid_argument("e_step: delta must be >= 0");
  if (a.size() != b.size()) throw std::invalid_argument("e_step: length mismatch");
  if (a.empty()) throw std::invalid_argument("e_step: empty vectors");
  return scalar_e_step(e, reduce_pair(a, b), delta);
}

double unit_interval_step(double e, double a_sq, double b_sq, double delta) {
  require_state(e, "unit_interval_step");
  const double top = delta + a_sq * e;
  const double denom = top + b_sq;
  if (denom == 0.0) throw std::domain_error("unit_interval_step: degenerate step");
  return top / denom;
}

double run_chain(const EChainConfig& config, std::uint64_t steps, Rng& rng,
                 std::vector<double>* trajectory) {
  if (config.users == 0) throw std::invalid_argument("run_chain: users must be positive");
  if (config.delta < 0.0) throw std::invalid_argument("run_chain: delta must be >= 0");
  double e = 0.0;
  switch (config.start) {
    case ChainStart::Zero:
      e = 0.0;
      break;
    case ChainStart::Infinity:
      e = std::numeric_limits<double>::infinity();
      break;
    case ChainStart::Value:
      e = config.start_value;
      require_state(e, "run_chain");
      break;
  }
  if (trajectory != nullptr) {
    trajectory->clear();
    trajectory->reserve(steps);
  }
  std::vector<std::complex<double>> a(config.users);
  std::vector<std::complex<double>> b(config.users);
  for (std::uint64_t i = 0; i < steps; ++i) {
    draw_row(config.model_b, rng, b);
    draw_row(config.model_a, rng, a);
    e = scalar_e_step(e, reduce_pair(a, b), config.delta);
    if (trajectory != nullptr) trajectory->push_back(e);
  }
  return e;
}

OffsetBoundLadder offset_ladder(const FadingModel& model_a, const FadingModel& model_b,
                                std::size_t users, std::uint32_t max_order,
                                std::uint64_t trials, std::uint64_t seed, bool coupled,
                                unsigned threads) {
  if (users == 0) throw std::invalid_argument("offset_ladder: users must be positive");
  if (max_order == 0) throw std::invalid_argument("offset_ladder: order must be positive");
  if (trials < 2) throw std::invalid_argument("offset_ladder: need at least 2 trials");

  const double k = static_cast<double>(users);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> lower(max_order);
  std::vector<std::vector<double>> upper(max_order);
  for (std::uint32_t n = 0; n < max_order; ++n) {
    lower[n].assign(trials, 0.0);
    upper[n].assign(trials, 0.0);
  }

  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(seed, t);
    std::vector<std::complex<double>> a(users);
    std::vector<std::complex<double>> b(users);
    if (coupled) {
      // All orders reuse one drawn step sequence, aligned so that order n
      // applies its last n steps, and are scored with one shared probe.  The
      // order-(n+1) run then only prepends a step, which (the map being
      // monotone in the state) pulls the start strictly inside the previous
      // bracket: within the trial, lower is nondecreasing in n, upper is
      // nonincreasing, and lower <= upper throughout.
      std::vector<StepScalars> steps(max_order);
      for (std::uint32_t j = 0; j < max_order; ++j) {
        draw_row(model_b, rng, b);
        draw_row(model_a, rng, a);
        steps[j] = reduce_pair(a, b);
      }
      draw_row(model_b, rng, b);
      const double probe_sq = sq_norm(b);
      for (std::uint32_t n = 1; n <= max_order; ++n) {
        double lo = 0.0;
        double hi = inf;
        for (std::uint32_t j = max_order - n; j < max_order; ++j) {
          lo = scalar_e_step(lo, steps[j], 0.0);
          hi = scalar_e_step(hi, steps[j], 0.0);
        }
        lower[n - 1][t] = std::log((lo + probe_sq) / k);
        upper[n - 1][t] = std::log((hi + probe_sq) / k);
      }
    } else {
      for (std::uint32_t n = 1; n <= max_order; ++n) {
        double lo = 0.0;
        for (std::uint32_t j = 0; j < n; ++j) {
          draw_row(model_b, rng, b);
          draw_row(model_a, rng, a);
          lo = scalar_e_step(lo, reduce_pair(a, b), 0.0);
        }
        draw_row(model_b, rng, b);
        lower[n - 1][t] = std::log((lo + sq_norm(b)) / k);
        double hi = inf;
        for (std::uint32_t j = 0; j < n; ++j) {
          draw_row(model_b, rng, b);
          draw_row(model_a, rng, a);
          hi = scalar_e_step(hi, reduce_pair(a, b), 0.0);
        }
        draw_row(model_b, rng, b);
        upper[n - 1][t] = std::log((hi + sq_norm(b)) / k);
      }
    }
  });

  OffsetBoundLadder out;
  out.users = users;
  out.trials = trials;
  out.seed = seed;
  out.coupled = coupled;
  out.entries.resize(max_order);
  std::vector<double> scratch(trials);
  for (std::uint32_t n = 1; n <= max_order; ++n) {
    OffsetBound& entry = out.entries[n - 1];
    entry.order = n;
    const MeanSe lo = mean_and_se(lower[n - 1]);
    const MeanSe hi = mean_and_se(upper[n - 1]);
    entry.lower_nats = lo.mean;
    entry.lower_se = lo.se;
    entry.upper_nats = hi.mean;
    entry.upper_se = hi.se;
    for (std::uint64_t t = 0; t < trials; ++t) scratch[t] = upper[n - 1][t] - lower[n - 1][t];
    entry.gap_se = mean_and_se(scratch).se;
    if (n >= 2) {
      for (std::uint64_t t = 0; t < trials; ++t) scratch[t] = lower[n - 1][t] - lower[n - 2][t];
      entry.lower_step_se = mean_and_se(scratch).se;
      for (std::uint64_t t = 0; t < trials; ++t) scratch[t] = upper[n - 1][t] - upper[n - 2][t];
      entry.upper_step_se = mean_and_se(scratch).se;
    }
    // The offset's lower bound caps the power offset from above and vice
    // versa (bits, base-2 SNR axis).
    entry.l_inf_upper_bits = -entry.lower_nats / kLn2;
    entry.l_inf_upper_se_bits = entry.lower_se / kLn2;
    entry.l_inf_lower_bits = -entry.upper_nats / kLn2;
    entry.l_inf_lower_se_bits = entry.upper_se / kLn2;
  }
  return out;
}

OffsetBound offset_bounds(const FadingModel& model_a, const FadingModel& model_b,
                          std::size_t users, std::uint32_t order, std::uint64_t trials,
                          std::uint64_t seed, bool coupled, unsigned threads) {
  return offset_ladder(model_a, model_b, users, order, trials, seed, coupled, threads)
      .entries.back();
}

StationaryOffset stationary_offset(const FadingModel& model_a, const FadingModel& model_b,
                                   std::size_t users, std::uint64_t burn_in,
                                   std::uint64_t samples, std::uint64_t seed) {
  if (users == 0) throw std::invalid_argument("stationary_offset: users must be positive");
  if (burn_in == 0) {
    throw std::invalid_argument("stationary_offset: burn-in must be >= 1 (chain starts at infinity)");
  }
  if (samples < 2) throw std::invalid_argument("stationary_offset: need at least 2 samples");

  const double k = static_cast<double>(users);
  Rng rng(seed, 0);
  std::vector<std::complex<double>> a(users);
  std::vector<std::complex<double>> b(users);
  std::vector<double> values;
  values.reserve(samples);

  double e = std::numeric_limits<double>::infinity();
  draw_row(model_b, rng, b);
  const std::uint64_t total = burn_in + samples;
  for (std::uint64_t i = 0; i < total; ++i) {
    if (i >= burn_in) values.push_back(std::log((e + sq_norm(b)) / k));
    draw_row(model_a, rng, a);
    e = scalar_e_step(e, reduce_pair(a, b), 0.0);
    draw_row(model_b, rng, b);
  }

  const MeanSe ms = batch_mean_se(values);
  StationaryOffset out;
  out.offset_nats = ms.mean;
  out.se_nats = ms.se;
  out.l_inf_bits = -ms.mean / kLn2;
  out.l_inf_se_bits = ms.se / kLn2;
  out.burn_in = burn_in;
  out.samples = samples;
  out.seed = seed;
  return out;
}

TdmaOffset high_snr_offset_tdma(const FadingModel& model_a, const FadingModel& model_b,
                                std::uint64_t mc_samples, std::uint64_t seed) {
  const MomentSummary ma = model_a.moments(mc_samples, seed);
  const MomentSummary mb =
      model_a.spec() == model_b.spec() ? ma : model_b.moments(mc_samples, seed);
  if (!ma.log_moments_finite || !mb.log_moments_finite) {
    throw std::domain_error("high_snr_offset_tdma: a gain law puts mass at zero");
  }
  // In a time slot the single active group is heard through whichever row has
  // the larger log moment; the weaker row stops mattering as the power grows.
  const bool a_wins = ma.e_log_abs >= mb.e_log_abs;
  TdmaOffset out;
  out.offset_nats = 2.0 * (a_wins ? ma.e_log_abs : mb.e_log_abs);
  out.se_nats = 2.0 * (a_wins ? ma.e_log_abs_se : mb.e_log_abs_se);
  out.l_inf_bits = -out.offset_nats / kLn2;
  out.l_inf_se_bits = out.se_nats / kLn2;
  return out;
}

}  // namespace softcell
