#pragma once

#include <cstddef>
#include <functional>

namespace softcell {

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;  // sum of per-segment error estimates
  std::size_t segments = 0;
};

// Adaptive Gauss-7/Kronrod-15 integration on a finite interval, refining the
// segment with the largest error estimate first.  Throws std::runtime_error
// if `abs_tol` is not reached within `max_segments` segments and
// std::domain_error if the integrand returns a non-finite value.
QuadratureResult integrate_gk(const std::function<double(double)>& f, double lo, double hi,
                              double abs_tol, std::size_t max_segments = 4000);

}  // namespace softcell
