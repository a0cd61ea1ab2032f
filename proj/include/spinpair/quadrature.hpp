#pragma once

#include <functional>

namespace spinpair {

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
  bool converged = false;
};

// Globally adaptive 7/15-point Gauss-Kronrod on [a, b], starting from
// `initial_panels` equal panels (use about one panel per oscillation for
// oscillatory integrands). Stops when error <= max(abs_tol, rel_tol*|value|)
// or when `max_intervals` is reached (converged = false).
QuadratureResult integrate_gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                                         double abs_tol, double rel_tol, int max_intervals,
                                         int initial_panels = 1);

}  // namespace spinpair
