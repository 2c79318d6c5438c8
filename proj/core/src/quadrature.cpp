#include "softcell/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "softcell/check.hpp"
#include "softcell/statistics.hpp"

namespace softcell {
namespace {

// Gauss-Kronrod 7/15 abscissae mapped to the unit interval; odd indices are
// the embedded 7-point Gauss nodes.
constexpr double kNodes[15] = {
    0.0042723144395936940576063989283284,
    0.025446043828620756865888097308925,
    0.067567788320115451661251881887438,
    0.12923440720030276995800022632466,
    0.20695638226615442611944217787823,
    0.29707742431130140792205907018797,
    0.3961075224960507457083735971537,
    0.5,
    0.6038924775039492542916264028463,
    0.7029225756886985365667896985542,
    0.79304361773384557388055782212177,
    0.87076559279969723004199977367534,
    0.93243221167988454833874811811256,
    0.97455395617137918762296067143325,
    0.99572768556040625043124236981384,
};

constexpr double kKronrodWeights[15] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
};

constexpr double kGaussWeights[7] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
};

struct Segment {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
  double error = 0.0;

  bool operator<(const Segment& other) const { return error < other.error; }
};

Segment evaluate(const std::function<double(double)>& f, double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  double kronrod = 0.0;
  double gauss = 0.0;
  for (int j = 0; j < 15; ++j) {
    const double x = lo + (hi - lo) * kNodes[j];
    const double y = f(x);
    if (!std::isfinite(y)) {
      throw std::domain_error("integrand is not finite at x = " + std::to_string(x));
    }
    kronrod += kKronrodWeights[j] * y;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * y;
  }
  Segment seg;
  seg.lo = lo;
  seg.hi = hi;
  seg.value = kronrod * half;
  seg.error = std::abs(kronrod - gauss) * half;
  return seg;
}

}  // namespace

QuadratureResult integrate_gk(const std::function<double(double)>& f, double lo, double hi,
                              double abs_tol, std::size_t max_segments) {
  require(std::isfinite(lo) && std::isfinite(hi) && lo <= hi, "invalid integration interval");
  require(std::isfinite(abs_tol) && abs_tol > 0.0, "absolute tolerance must be positive");
  require(max_segments >= 1, "need at least one segment");
  if (lo == hi) return {0.0, 0.0, 0};

  std::vector<Segment> heap;
  heap.push_back(evaluate(f, lo, hi));
  double total_error = heap.front().error;

  while (total_error > abs_tol && heap.size() < max_segments) {
    std::pop_heap(heap.begin(), heap.end());
    const Segment worst = heap.back();
    heap.pop_back();
    total_error -= worst.error;

    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      // The interval no longer splits in floating point; keep it as is.
      heap.push_back(worst);
      std::push_heap(heap.begin(), heap.end());
      total_error += worst.error;
      break;
    }
    for (const Segment& child : {evaluate(f, worst.lo, mid), evaluate(f, mid, worst.hi)}) {
      total_error += child.error;
      heap.push_back(child);
      std::push_heap(heap.begin(), heap.end());
    }
  }

  // Recompute the totals with compensated sums; the running value above only
  // steers refinement.
  std::vector<double> values(heap.size());
  std::vector<double> errors(heap.size());
  for (std::size_t i = 0; i < heap.size(); ++i) {
    values[i] = heap[i].value;
    errors[i] = heap[i].error;
  }
  QuadratureResult result;
  result.value = pairwise_sum(values);
  result.abs_error = pairwise_sum(errors);
  result.segments = heap.size();
  if (result.abs_error > abs_tol) {
    throw std::runtime_error("quadrature did not reach the requested tolerance (error " +
                             std::to_string(result.abs_error) + " > " +
                             std::to_string(abs_tol) + ")");
  }
  return result;
}

}  // namespace softcell
