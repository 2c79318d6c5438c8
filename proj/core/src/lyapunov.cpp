#include "softcell/lyapunov.hpp"

#include <cmath>
#include <stdexcept>

#include "softcell/parallel.hpp"
#include "softcell/statistics.hpp"

namespace softcell {

namespace {

constexpr std::complex<double> kOne{1.0, 0.0};
constexpr std::complex<double> kZero{0.0, 0.0};

void renormalize(Mat2& m, double& log_scale) {
  const double scale = frobenius_norm(m);
  if (!(scale > 0.0)) throw std::domain_error("transfer product collapsed to zero");
  m.m00 /= scale;
  m.m01 /= scale;
  m.m10 /= scale;
  m.m11 /= scale;
  log_scale += std::log(scale);
}

// Shared state for walking the transfer cocycle with the draw order
// b_0, a_1, b_1, then per step a_{n+1} before the multiply and b_{n+1} after.
struct CocycleWalk {
  const FadingModel& model_a;
  const FadingModel& model_b;
  double lambda;
  Rng& rng;
  std::complex<double> a_cur, b_prev, b_cur;

  CocycleWalk(const FadingModel& a, const FadingModel& b, double lambda_in, Rng& rng_in)
      : model_a(a), model_b(b), lambda(lambda_in), rng(rng_in) {
    b_prev = model_b.sample_gain(rng);
    a_cur = model_a.sample_gain(rng);
    b_cur = model_b.sample_gain(rng);
  }

  void advance(Mat2& prod, double& log_scale) {
    const std::complex<double> a_next = model_a.sample_gain(rng);
    prod = transfer_matrix(lambda, a_cur, a_next, b_prev, b_cur) * prod;
    renormalize(prod, log_scale);
    a_cur = a_next;
    b_prev = b_cur;
    b_cur = model_b.sample_gain(rng);
  }
};

}  // namespace

Mat2 operator*(const Mat2& lhs, const Mat2& rhs) {
  Mat2 out;
  out.m00 = lhs.m00 * rhs.m00 + lhs.m01 * rhs.m10;
  out.m01 = lhs.m00 * rhs.m01 + lhs.m01 * rhs.m11;
  out.m10 = lhs.m10 * rhs.m00 + lhs.m11 * rhs.m10;
  out.m11 = lhs.m10 * rhs.m01 + lhs.m11 * rhs.m11;
  return out;
}

double frobenius_norm(const Mat2& m) {
  return std::sqrt(std::norm(m.m00) + std::norm(m.m01) + std::norm(m.m10) + std::norm(m.m11));
}

double spectral_norm(const Mat2& m) {
  // For a 2x2 matrix, sigma_max^2 = (F^2 + sqrt(F^4 - 4 |det|^2)) / 2 with
  // F the Frobenius norm.
  const double fro_sq = std::norm(m.m00) + std::norm(m.m01) + std::norm(m.m10) + std::norm(m.m11);
  const double det_sq = std::norm(m.m00 * m.m11 - m.m01 * m.m10);
  double disc = fro_sq * fro_sq - 4.0 * det_sq;
  if (disc < 0.0) disc = 0.0;  // exact zero up to rounding when sigma_1 = sigma_2
  return std::sqrt(0.5 * (fro_sq + std::sqrt(disc)));
}

double matrix_norm(const Mat2& m, MatrixNorm norm) {
  return norm == MatrixNorm::Spectral ? spectral_norm(m) : frobenius_norm(m);
}

Mat2 transfer_matrix(double lambda, std::complex<double> a_n, std::complex<double> a_next,
                     std::complex<double> b_prev, std::complex<double> b_n) {
  const std::complex<double> denom = std::conj(a_next) * b_n;
  if (std::abs(denom) == 0.0) {
    throw std::domain_error("transfer_matrix: vanishing coupling coefficient");
  }
  Mat2 g;
  g.m00 = (lambda - std::norm(a_n) - std::norm(b_n)) / denom;
  g.m01 = -(a_n * std::conj(b_prev)) / denom;
  g.m10 = kOne;
  g.m11 = kZero;
  return g;
}

RecurrenceLog recurrence_logx(const ChannelRealization& ch, double lambda) {
  if (ch.users != 1) throw std::invalid_argument("recurrence_logx: single-user groups only");
  if (ch.cells < 2) throw std::invalid_argument("recurrence_logx: need at least 2 cells");
  const std::uint64_t steps = ch.cells - 1;

  // Gain indices: step n in [1, M] reads a_n = a_row(n - 1), a_{n+1} =
  // a_row(n), b_n = b_row(n - 1), b_{n-1} = b_row(n - 2).  The n = 1
  // coefficient multiplies x_0 = 0, so its trailing gain is immaterial.
  std::complex<double> x_prev = kZero;  // x_0
  std::complex<double> x_cur = kOne;    // x_1
  double log_scale = 0.0;
  CompensatedSum companion;
  for (std::uint64_t n = 1; n <= steps; ++n) {
    const std::complex<double> a_n = ch.a_row(n - 1)[0];
    const std::complex<double> a_next = ch.a_row(n)[0];
    const std::complex<double> b_prev = n >= 2 ? ch.b_row(n - 2)[0] : kOne;
    const std::complex<double> b_n = ch.b_row(n - 1)[0];
    const std::complex<double> denom = std::conj(a_next) * b_n;
    if (std::abs(denom) == 0.0) {
      throw std::domain_error("recurrence_logx: vanishing coupling coefficient");
    }
    const std::complex<double> c1 = (lambda - std::norm(a_n) - std::norm(b_n)) / denom;
    const std::complex<double> c0 = (a_n * std::conj(b_prev)) / denom;
    std::complex<double> x_next = c1 * x_cur - c0 * x_prev;

    const double scale = std::max(std::abs(x_next), std::abs(x_cur));
    if (!(scale > 0.0)) throw std::domain_error("recurrence_logx: solution vanished");
    x_prev = x_cur / scale;
    x_cur = x_next / scale;
    log_scale += std::log(scale);

    companion.add(std::log(std::abs(a_next)) + std::log(std::abs(b_n)));
  }

  RecurrenceLog out;
  out.log_x_final = log_scale + std::log(std::abs(x_cur));
  out.companion_sum = companion.value();
  out.steps = steps;
  return out;
}

RecurrenceLog recurrence_logx(const FadingModel& model_a, const FadingModel& model_b,
                              double lambda, std::uint64_t steps, std::uint64_t seed) {
  if (steps == 0) throw std::invalid_argument("recurrence_logx: need at least 1 step");
  Rng rng(seed, 0);
  const ChannelRealization ch =
      sample_channel(model_a, model_b, static_cast<std::size_t>(steps + 1), 1, rng);
  return recurrence_logx(ch, lambda);
}

LyapunovEstimate lyapunov_estimate(const FadingModel& model_a, const FadingModel& model_b,
                                   double lambda, std::uint64_t cells, std::uint64_t reps,
                                   std::uint64_t seed, MatrixNorm norm, unsigned threads) {
  if (cells == 0) throw std::invalid_argument("lyapunov_estimate: need at least 1 cell");
  if (reps < 2) throw std::invalid_argument("lyapunov_estimate: need at least 2 replicates");

  std::vector<double> values(reps);
  parallel_for(reps, threads, [&](std::size_t r) {
    Rng rng(seed, r);
    CocycleWalk walk(model_a, model_b, lambda, rng);
    Mat2 prod = Mat2::identity();
    double log_scale = 0.0;
    for (std::uint64_t n = 0; n < cells; ++n) walk.advance(prod, log_scale);
    values[r] = (log_scale + std::log(matrix_norm(prod, norm))) / static_cast<double>(cells);
  });

  const MeanSe ms = mean_and_se(values);
  LyapunovEstimate out;
  out.gamma_hat = ms.mean;
  out.se = ms.se;
  out.lambda = lambda;
  out.cells = cells;
  out.reps = reps;
  out.seed = seed;
  out.norm = norm;
  return out;
}

UpperBoundEstimate lyapunov_upper_bound(const FadingModel& model_a, const FadingModel& model_b,
                                        double lambda, std::uint32_t window,
                                        std::uint64_t trials, std::uint64_t seed,
                                        unsigned threads) {
  if (window == 0) throw std::invalid_argument("lyapunov_upper_bound: window must be positive");
  if (trials < 2) throw std::invalid_argument("lyapunov_upper_bound: need at least 2 trials");

  std::vector<double> values(trials);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(seed, t);
    CocycleWalk walk(model_a, model_b, lambda, rng);
    Mat2 prod = Mat2::identity();
    double log_scale = 0.0;
    for (std::uint32_t n = 0; n < window; ++n) walk.advance(prod, log_scale);
    values[t] = (log_scale + std::log(spectral_norm(prod))) / static_cast<double>(window);
  });

  const MeanSe ms = mean_and_se(values);
  UpperBoundEstimate out;
  out.bound = ms.mean;
  out.se = ms.se;
  out.window = window;
  out.trials = trials;
  out.lambda = lambda;
  out.seed = seed;
  return out;
}

}  // namespace softcell
