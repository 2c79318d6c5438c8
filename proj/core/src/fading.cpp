#include "softcell/fading.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "softcell/check.hpp"
#include "softcell/constants.hpp"
#include "softcell/format.hpp"
#include "softcell/parallel.hpp"
#include "softcell/statistics.hpp"

namespace softcell {
namespace {

constexpr std::size_t kMomentBlock = 8192;
constexpr std::size_t kBootstrapReplicates = 200;

// Column layout of the per-block accumulator: sum and sum of squares for
// Re x, Im x, |x|^2, |x|^4, log|x|, (log|x|)^2.
constexpr std::size_t kNumStats = 6;
constexpr std::size_t kNumColumns = 2 * kNumStats;
enum StatColumn : std::size_t { kRe = 0, kIm, kPow2, kPow4, kLogAbs, kLogAbsSq };

double parse_positive_double(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid " + what + ": '" + text + "'");
  }
  require(pos == text.size(), "trailing characters in " + what + ": '" + text + "'");
  require(std::isfinite(value) && value > 0.0, what + " must be positive: '" + text + "'");
  return value;
}

int parse_positive_int(const std::string& text, const std::string& what) {
  std::size_t pos = 0;
  long value = 0;
  try {
    value = std::stol(text, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("invalid " + what + ": '" + text + "'");
  }
  require(pos == text.size(), "trailing characters in " + what + ": '" + text + "'");
  require(value >= 1 && value <= std::numeric_limits<int>::max(),
          what + " must be a positive integer: '" + text + "'");
  return static_cast<int>(value);
}

MomentSummary closed_form_summary(FadingKind kind, double alpha) {
  MomentSummary s;
  s.analytic = true;
  s.log_moments_finite = true;
  switch (kind) {
    case FadingKind::NonFading:
    case FadingKind::PhaseOnly:
      s.m1 = kind == FadingKind::NonFading ? std::complex<double>{1.0, 0.0}
                                           : std::complex<double>{0.0, 0.0};
      s.m2 = 1.0;
      s.m4 = 1.0;
      s.kurtosis = 1.0;
      s.e_log_abs = 0.0;
      s.e_log_abs_sq_2nd = 0.0;
      break;
    case FadingKind::Rayleigh:
    case FadingKind::ScaledRayleigh: {
      // |x|^2 is alpha^2 * Exp(1): E log Exp(1) = -gamma and
      // Var log Exp(1) = pi^2/6 give both log moments in closed form.
      const double a2 = alpha * alpha;
      const double la = std::log(alpha);
      const double second_exp = kEulerGamma * kEulerGamma + std::numbers::pi * std::numbers::pi / 6.0;
      s.m1 = {0.0, 0.0};
      s.m2 = a2;
      s.m4 = 2.0 * a2 * a2;
      s.kurtosis = 2.0;
      s.e_log_abs = la - 0.5 * kEulerGamma;
      s.e_log_abs_sq_2nd = la * la - kEulerGamma * la + 0.25 * second_exp;
      break;
    }
    default:
      throw std::logic_error("closed_form_summary: kind has no closed form");
  }
  return s;
}

struct ColumnTotals {
  std::array<double, kNumColumns> sums{};
  std::uint64_t count = 0;
  bool zero_seen = false;
};

void accumulate_gain(std::array<double, kNumColumns>& cols, bool& zero_seen,
                     std::complex<double> x) {
  const double re = x.real();
  const double im = x.imag();
  const double p2 = re * re + im * im;
  cols[2 * kRe] += re;
  cols[2 * kRe + 1] += re * re;
  cols[2 * kIm] += im;
  cols[2 * kIm + 1] += im * im;
  cols[2 * kPow2] += p2;
  cols[2 * kPow2 + 1] += p2 * p2;
  cols[2 * kPow4] += p2 * p2;
  cols[2 * kPow4 + 1] += p2 * p2 * p2 * p2;
  if (p2 > 0.0) {
    const double lg = 0.5 * std::log(p2);
    cols[2 * kLogAbs] += lg;
    cols[2 * kLogAbs + 1] += lg * lg;
    cols[2 * kLogAbsSq] += lg * lg;
    cols[2 * kLogAbsSq + 1] += lg * lg * lg * lg;
  } else {
    zero_seen = true;
  }
}

double iid_se(double sum, double sum_sq, std::uint64_t n) {
  if (n < 2) return 0.0;
  const double mean = sum / static_cast<double>(n);
  const double var = std::max(0.0, (sum_sq - static_cast<double>(n) * mean * mean) /
                                       static_cast<double>(n - 1));
  return std::sqrt(var / static_cast<double>(n));
}

}  // namespace

FadingModel FadingModel::nonfading() {
  FadingModel m;
  m.kind_ = FadingKind::NonFading;
  return m;
}

FadingModel FadingModel::rayleigh() {
  FadingModel m;
  m.kind_ = FadingKind::Rayleigh;
  return m;
}

FadingModel FadingModel::scaled_rayleigh(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0, "scaled-rayleigh requires alpha > 0");
  FadingModel m;
  m.kind_ = FadingKind::ScaledRayleigh;
  m.alpha_ = alpha;
  return m;
}

FadingModel FadingModel::phase_only() {
  FadingModel m;
  m.kind_ = FadingKind::PhaseOnly;
  return m;
}

FadingModel FadingModel::max_order_stat(FadingModel base, int pool) {
  require(pool >= 1, "max-order statistic requires a pool of at least 1");
  FadingModel m;
  m.kind_ = FadingKind::MaxOrderStat;
  m.pool_ = pool;
  m.base_ = std::make_shared<const FadingModel>(std::move(base));
  return m;
}

FadingModel FadingModel::empirical(std::vector<std::complex<double>> samples,
                                   std::string origin) {
  require(!samples.empty(), "empirical model requires at least one sample");
  FadingModel m;
  m.kind_ = FadingKind::Empirical;
  m.samples_ = std::make_shared<const std::vector<std::complex<double>>>(std::move(samples));
  m.origin_ = std::move(origin);
  return m;
}

FadingModel FadingModel::parse(const std::string& spec) {
  if (spec == "nonfading") return nonfading();
  if (spec == "rayleigh") return rayleigh();
  if (spec == "phase-only") return phase_only();
  if (spec.rfind("scaled-rayleigh:", 0) == 0) {
    return scaled_rayleigh(parse_positive_double(spec.substr(16), "scaled-rayleigh alpha"));
  }
  if (spec.rfind("maxk:", 0) == 0) {
    const std::string rest = spec.substr(5);
    const std::size_t colon = rest.find(':');
    require(colon != std::string::npos, "maxk spec must be maxk:<K>:<base>");
    const int pool = parse_positive_int(rest.substr(0, colon), "maxk pool size");
    return max_order_stat(parse(rest.substr(colon + 1)), pool);
  }
  if (spec.rfind("empirical:", 0) == 0) {
    const std::string path = spec.substr(10);
    require(!path.empty(), "empirical spec must name a file: empirical:<path>");
    return empirical(read_complex_samples(path), path);
  }
  throw std::invalid_argument(
      "unknown fading model '" + spec +
      "' (expected nonfading | rayleigh | phase-only | scaled-rayleigh:<alpha> | "
      "maxk:<K>:<base> | empirical:<path>)");
}

std::string FadingModel::spec() const {
  switch (kind_) {
    case FadingKind::NonFading:
      return "nonfading";
    case FadingKind::Rayleigh:
      return "rayleigh";
    case FadingKind::PhaseOnly:
      return "phase-only";
    case FadingKind::ScaledRayleigh:
      return "scaled-rayleigh:" + format_double(alpha_);
    case FadingKind::MaxOrderStat:
      return "maxk:" + std::to_string(pool_) + ":" + base_->spec();
    case FadingKind::Empirical:
      return "empirical:" + (origin_.empty() ? "<inline>" : origin_);
  }
  return "unknown";
}

const FadingModel& FadingModel::base() const {
  require(base_ != nullptr, "model has no base law");
  return *base_;
}

const std::vector<std::complex<double>>& FadingModel::samples() const {
  require(samples_ != nullptr, "model has no sample list");
  return *samples_;
}

std::complex<double> FadingModel::sample_gain(Rng& rng) const {
  switch (kind_) {
    case FadingKind::NonFading:
      return {1.0, 0.0};
    case FadingKind::Rayleigh:
      return rng.next_unit_cnormal();
    case FadingKind::ScaledRayleigh:
      return alpha_ * rng.next_unit_cnormal();
    case FadingKind::PhaseOnly: {
      const double theta = 2.0 * std::numbers::pi * rng.next_double();
      return {std::cos(theta), std::sin(theta)};
    }
    case FadingKind::MaxOrderStat: {
      std::complex<double> best = base_->sample_gain(rng);
      double best_norm = std::norm(best);
      for (int i = 1; i < pool_; ++i) {
        const std::complex<double> cand = base_->sample_gain(rng);
        const double cand_norm = std::norm(cand);
        if (cand_norm > best_norm) {
          best = cand;
          best_norm = cand_norm;
        }
      }
      return best;
    }
    case FadingKind::Empirical:
      return (*samples_)[rng.next_index(samples_->size())];
  }
  return {0.0, 0.0};
}

MomentSummary FadingModel::moments(std::uint64_t mc_samples, std::uint64_t seed,
                                   unsigned threads) const {
  switch (kind_) {
    case FadingKind::NonFading:
    case FadingKind::Rayleigh:
    case FadingKind::PhaseOnly:
      return closed_form_summary(kind_, 1.0);
    case FadingKind::ScaledRayleigh:
      return closed_form_summary(kind_, alpha_);
    case FadingKind::Empirical:
      return empirical_moments(seed, threads);
    case FadingKind::MaxOrderStat:
      break;
  }

  // Monte Carlo path.  Draws are split into fixed-size blocks, one RNG
  // stream per block, so the result is identical for every thread count.
  require(mc_samples >= 2, "moment estimation needs at least 2 samples");
  const std::size_t num_blocks =
      static_cast<std::size_t>((mc_samples + kMomentBlock - 1) / kMomentBlock);
  std::vector<ColumnTotals> blocks(num_blocks);

  parallel_for(num_blocks, threads, [&](std::size_t block) {
    Rng rng(seed, block);
    const std::uint64_t begin = static_cast<std::uint64_t>(block) * kMomentBlock;
    const std::uint64_t end = std::min<std::uint64_t>(begin + kMomentBlock, mc_samples);
    ColumnTotals& totals = blocks[block];
    totals.count = end - begin;
    for (std::uint64_t i = begin; i < end; ++i) {
      accumulate_gain(totals.sums, totals.zero_seen, sample_gain(rng));
    }
  });

  std::array<double, kNumColumns> grand{};
  bool zero_seen = false;
  for (std::size_t col = 0; col < kNumColumns; ++col) {
    std::vector<double> partials(num_blocks);
    for (std::size_t b = 0; b < num_blocks; ++b) partials[b] = blocks[b].sums[col];
    grand[col] = pairwise_sum(partials);
  }
  for (const ColumnTotals& b : blocks) zero_seen = zero_seen || b.zero_seen;

  const double n = static_cast<double>(mc_samples);
  MomentSummary s;
  s.analytic = false;
  s.mc_samples = mc_samples;
  s.m1 = {grand[2 * kRe] / n, grand[2 * kIm] / n};
  s.m2 = grand[2 * kPow2] / n;
  s.m4 = grand[2 * kPow4] / n;
  s.kurtosis = s.m4 / (s.m2 * s.m2);

  const double se_re = iid_se(grand[2 * kRe], grand[2 * kRe + 1], mc_samples);
  const double se_im = iid_se(grand[2 * kIm], grand[2 * kIm + 1], mc_samples);
  s.m1_se = std::sqrt(se_re * se_re + se_im * se_im);
  s.m2_se = iid_se(grand[2 * kPow2], grand[2 * kPow2 + 1], mc_samples);
  s.m4_se = iid_se(grand[2 * kPow4], grand[2 * kPow4 + 1], mc_samples);

  // Kurtosis is a ratio of means; its error comes from full blocks treated
  // as replicates.
  std::vector<double> kurt_replicates;
  kurt_replicates.reserve(num_blocks);
  for (const ColumnTotals& b : blocks) {
    if (b.count != kMomentBlock) continue;
    const double m2b = b.sums[2 * kPow2] / static_cast<double>(b.count);
    const double m4b = b.sums[2 * kPow4] / static_cast<double>(b.count);
    if (m2b > 0.0) kurt_replicates.push_back(m4b / (m2b * m2b));
  }
  if (kurt_replicates.size() >= 2) {
    const MeanSe rep = mean_and_se(kurt_replicates);
    s.kurtosis_se = rep.se;
  }

  if (zero_seen) {
    s.log_moments_finite = false;
    s.e_log_abs = -std::numeric_limits<double>::infinity();
    s.e_log_abs_sq_2nd = std::numeric_limits<double>::infinity();
  } else {
    s.log_moments_finite = true;
    s.e_log_abs = grand[2 * kLogAbs] / n;
    s.e_log_abs_sq_2nd = grand[2 * kLogAbsSq] / n;
    s.e_log_abs_se = iid_se(grand[2 * kLogAbs], grand[2 * kLogAbs + 1], mc_samples);
    s.e_log_abs_sq_2nd_se = iid_se(grand[2 * kLogAbsSq], grand[2 * kLogAbsSq + 1], mc_samples);
  }
  return s;
}

MomentSummary FadingModel::empirical_moments(std::uint64_t seed, unsigned threads) const {
  const std::vector<std::complex<double>>& data = *samples_;
  const std::size_t n = data.size();

  std::array<double, kNumColumns> totals{};
  bool zero_seen = false;
  {
    // Exact averages over the stored list (the list *is* the law).
    std::vector<std::vector<double>> cols(kNumColumns, std::vector<double>(n, 0.0));
    std::array<double, kNumColumns> row{};
    for (std::size_t i = 0; i < n; ++i) {
      row.fill(0.0);
      accumulate_gain(row, zero_seen, data[i]);
      for (std::size_t c = 0; c < kNumColumns; ++c) cols[c][i] = row[c];
    }
    for (std::size_t c = 0; c < kNumColumns; ++c) totals[c] = pairwise_sum(cols[c]);
  }

  const double dn = static_cast<double>(n);
  MomentSummary s;
  s.analytic = false;
  s.mc_samples = n;
  s.m1 = {totals[2 * kRe] / dn, totals[2 * kIm] / dn};
  s.m2 = totals[2 * kPow2] / dn;
  s.m4 = totals[2 * kPow4] / dn;
  s.kurtosis = s.m2 > 0.0 ? s.m4 / (s.m2 * s.m2) : std::numeric_limits<double>::quiet_NaN();

  const double se_re = iid_se(totals[2 * kRe], totals[2 * kRe + 1], n);
  const double se_im = iid_se(totals[2 * kIm], totals[2 * kIm + 1], n);
  s.m1_se = std::sqrt(se_re * se_re + se_im * se_im);
  s.m2_se = iid_se(totals[2 * kPow2], totals[2 * kPow2 + 1], n);
  s.m4_se = iid_se(totals[2 * kPow4], totals[2 * kPow4 + 1], n);

  if (zero_seen) {
    s.log_moments_finite = false;
    s.e_log_abs = -std::numeric_limits<double>::infinity();
    s.e_log_abs_sq_2nd = std::numeric_limits<double>::infinity();
  } else {
    s.log_moments_finite = true;
    s.e_log_abs = totals[2 * kLogAbs] / dn;
    s.e_log_abs_sq_2nd = totals[2 * kLogAbsSq] / dn;
    s.e_log_abs_se = iid_se(totals[2 * kLogAbs], totals[2 * kLogAbs + 1], n);
    s.e_log_abs_sq_2nd_se = iid_se(totals[2 * kLogAbsSq], totals[2 * kLogAbsSq + 1], n);
  }

  // Resampling replicates for the kurtosis error (ratio statistic; the
  // plain i.i.d. formula does not apply).
  if (n >= 2 && s.m2 > 0.0) {
    std::vector<double> replicates(kBootstrapReplicates, 0.0);
    parallel_for(kBootstrapReplicates, threads, [&](std::size_t r) {
      Rng rng(seed, 0x00b0'0000u + r);
      CompensatedSum sum2;
      CompensatedSum sum4;
      for (std::size_t i = 0; i < n; ++i) {
        const double p2 = std::norm(data[rng.next_index(n)]);
        sum2.add(p2);
        sum4.add(p2 * p2);
      }
      const double m2r = sum2.value() / dn;
      const double m4r = sum4.value() / dn;
      replicates[r] = m2r > 0.0 ? m4r / (m2r * m2r) : 0.0;
    });
    double mean = 0.0;
    for (double v : replicates) mean += v;
    mean /= static_cast<double>(kBootstrapReplicates);
    double var = 0.0;
    for (double v : replicates) var += (v - mean) * (v - mean);
    var /= static_cast<double>(kBootstrapReplicates - 1);
    s.kurtosis_se = std::sqrt(var);
  }
  return s;
}

Hypotheses FadingModel::hypotheses() const {
  Hypotheses h;
  switch (kind_) {
    case FadingKind::NonFading:
    case FadingKind::PhaseOnly:
      // Degenerate or circle-supported: log moments exist but there is no
      // density on the plane.
      h.h1 = true;
      break;
    case FadingKind::Rayleigh:
    case FadingKind::ScaledRayleigh:
      h.h1 = true;
      h.h2 = true;
      h.h3 = true;
      h.h3_prime = true;
      h.h4 = true;
      break;
    case FadingKind::MaxOrderStat:
      // The maximum of i.i.d. draws inherits absolute continuity and tail
      // support from the base law.
      h = base_->hypotheses();
      break;
    case FadingKind::Empirical: {
      bool zero = false;
      for (const std::complex<double>& x : *samples_) zero = zero || std::norm(x) == 0.0;
      h.h1 = !zero;
      break;
    }
  }
  return h;
}

LogMomentOrder compare_log_moments(const FadingModel& model_a, const FadingModel& model_b,
                                   std::uint64_t mc_samples, std::uint64_t seed) {
  const MomentSummary a = model_a.moments(mc_samples, seed);
  const MomentSummary b = model_b.moments(mc_samples, seed + 1);
  LogMomentOrder order;
  order.e_log_abs_a = a.e_log_abs;
  order.e_log_abs_b = b.e_log_abs;
  order.a_below_b = a.e_log_abs <= b.e_log_abs;
  return order;
}

std::vector<std::complex<double>> read_complex_samples(const std::string& path) {
  std::ifstream in(path);
  require(in.good(), "cannot open sample file: " + path);
  std::vector<std::complex<double>> samples;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream fields(line);
    double re = 0.0;
    double im = 0.0;
    if (!(fields >> re >> im)) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": expected two numbers per line (re im)");
    }
    std::string extra;
    if (fields >> extra) {
      throw std::invalid_argument(path + ":" + std::to_string(line_no) +
                                  ": unexpected trailing field '" + extra + "'");
    }
    samples.emplace_back(re, im);
  }
  require(!samples.empty(), "sample file has no data lines: " + path);
  return samples;
}

}  // namespace softcell
