#include "softcell/logdet.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "softcell/check.hpp"
#include "softcell/parallel.hpp"
#include "softcell/statistics.hpp"

namespace softcell {

double logdet_ldl(const TridiagonalHermitian& matrix) {
  const std::size_t m = matrix.cells();
  require(m >= 1, "empty matrix");
  require(matrix.offdiag.size() + 1 == m, "off-diagonal length must be cells - 1");
  CompensatedSum log_sum;
  double pivot = matrix.diag[0];
  if (!(pivot > 0.0)) throw std::domain_error("leading minor 1 is not positive");
  log_sum.add(std::log(pivot));
  for (std::size_t i = 1; i < m; ++i) {
    pivot = ldl_pivot(matrix.diag[i], matrix.offdiag[i - 1], pivot);
    if (!(pivot > 0.0)) {
      throw std::domain_error("leading minor " + std::to_string(i + 1) + " is not positive");
    }
    log_sum.add(std::log(pivot));
  }
  return log_sum.value();
}

double logdet_recursion(const TridiagonalHermitian& matrix) {
  const std::size_t m = matrix.cells();
  require(m >= 1, "empty matrix");
  require(matrix.offdiag.size() + 1 == m, "off-diagonal length must be cells - 1");
  // (prev, cur) track two consecutive leading minors up to the factored-out
  // scale e^{log_scale}.
  double prev = 1.0;
  double cur = matrix.diag[0];
  CompensatedSum log_scale;
  for (std::size_t i = 1; i < m; ++i) {
    const double next = matrix.diag[i] * cur - std::norm(matrix.offdiag[i - 1]) * prev;
    const double magnitude = std::max(std::abs(next), std::abs(cur));
    if (!(magnitude > 0.0)) throw std::domain_error("vanishing leading minor");
    log_scale.add(std::log(magnitude));
    prev = cur / magnitude;
    cur = next / magnitude;
  }
  if (!(cur > 0.0)) throw std::domain_error("determinant is not positive");
  return log_scale.value() + std::log(cur);
}

namespace {

// One trial of the streaming estimator: walk the cells in draw order,
// carrying only the previous b row and the previous pivot.
double streaming_logdet_trial(const FadingModel& model_a, const FadingModel& model_b,
                              std::size_t cells, std::size_t users, double rho, Rng& rng) {
  std::vector<std::complex<double>> a_row(users);
  std::vector<std::complex<double>> b_prev(users);
  std::vector<std::complex<double>> b_row(users);
  CompensatedSum log_sum;
  double pivot = 0.0;
  for (std::size_t m = 0; m < cells; ++m) {
    for (std::size_t l = 0; l < users; ++l) a_row[l] = model_a.sample_gain(rng);
    for (std::size_t l = 0; l < users; ++l) b_row[l] = model_b.sample_gain(rng);
    const double diag = 1.0 + rho * (sq_norm(a_row) + sq_norm(b_row));
    if (m == 0) {
      pivot = diag;
    } else {
      const std::complex<double> off = rho * inner(a_row, b_prev);
      pivot = ldl_pivot(diag, off, pivot);
    }
    if (!(pivot > 0.0)) throw std::domain_error("leading minor is not positive");
    log_sum.add(std::log(pivot));
    b_prev.swap(b_row);
  }
  return log_sum.value();
}

}  // namespace

CapacityEstimate capacity_mc(const FadingModel& model_a, const FadingModel& model_b,
                             std::size_t cells, std::size_t users, double power,
                             Protocol protocol, std::uint64_t trials, std::uint64_t seed,
                             unsigned threads) {
  require(cells >= 1, "need at least one cell");
  require(users >= 1, "need at least one user per group");
  require(std::isfinite(power) && power >= 0.0, "power must be finite and non-negative");
  require(trials >= 1, "need at least one trial");

  const bool tdma = protocol == Protocol::Tdma;
  const std::size_t draw_users = tdma ? 1 : users;
  const double rho = tdma ? power : power / static_cast<double>(users);
  const double inv_cells = 1.0 / static_cast<double>(cells);

  std::vector<double> values(trials, 0.0);
  parallel_for(trials, threads, [&](std::size_t t) {
    Rng rng(seed, t);
    values[t] =
        inv_cells * streaming_logdet_trial(model_a, model_b, cells, draw_users, rho, rng);
  });

  const MeanSe stats = mean_and_se(values);
  CapacityEstimate est;
  est.mean_nats = stats.mean;
  est.std_error = stats.se;
  est.trials = trials;
  est.cells = cells;
  est.users = users;
  est.power = power;
  est.protocol = protocol;
  est.seed = seed;
  return est;
}

}  // namespace softcell
