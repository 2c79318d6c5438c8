#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace softcell {

// Kahan–Neumaier compensated accumulator for long streamed sums.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Pairwise (cascade) summation: O(log n) rounding-error growth and a fixed
// association order, so reductions come out identical no matter how the work
// that produced the addends was scheduled.
inline double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 8) {
    CompensatedSum acc;
    for (double v : x) acc.add(v);
    return acc.value();
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;  // standard error of the mean
  std::size_t n = 0;
};

// Mean and standard error with unbiased sample variance; deviations are summed
// pairwise so the result does not depend on upstream scheduling.
inline MeanSe mean_and_se(std::span<const double> x) {
  MeanSe out;
  out.n = x.size();
  if (x.empty()) return out;
  out.mean = pairwise_sum(x) / static_cast<double>(x.size());
  if (x.size() < 2) return out;
  std::vector<double> sq(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - out.mean;
    sq[i] = d * d;
  }
  const double var = pairwise_sum(sq) / static_cast<double>(x.size() - 1);
  out.se = var > 0.0 ? std::sqrt(var / static_cast<double>(x.size())) : 0.0;
  return out;
}

// Standard error of the mean of a serially correlated sequence via batch
// means: the sequence is cut into `batches` equal blocks and the block means
// are treated as independent replicates.  Leftover trailing samples (at most
// batches-1 of them) are ignored for the error estimate but kept in the mean.
inline MeanSe batch_mean_se(std::span<const double> x, std::size_t batches = 100) {
  MeanSe out;
  out.n = x.size();
  if (x.empty()) return out;
  out.mean = pairwise_sum(x) / static_cast<double>(x.size());
  const std::size_t len = x.size() / batches;
  if (len == 0 || batches < 2) return mean_and_se(x);
  std::vector<double> means(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    means[b] = pairwise_sum(x.subspan(b * len, len)) / static_cast<double>(len);
  }
  const MeanSe blocks = mean_and_se(means);
  out.se = blocks.se;
  return out;
}

}  // namespace softcell
