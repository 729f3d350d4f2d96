#pragma once

#include <complex>
#include <functional>

namespace mbpi {

struct QuadratureResult {
  std::complex<double> value;
  double error = 0.0;
  double l1 = 0.0;
};

// Adaptive Gauss-Kronrod (15 point) with interval bisection up to max_depth
// levels. b may be +infinity. Throws NumericError when the error estimate
// exceeds max(rel_tol * L1, abs_tol) by more than a factor of 100.
QuadratureResult integrate(const std::function<std::complex<double>(double)>& f, double a, double b,
                           double rel_tol = 1e-10, double abs_tol = 1e-300, unsigned max_depth = 20);

double integrate_real(const std::function<double(double)>& f, double a, double b, double rel_tol = 1e-10,
                      double abs_tol = 1e-300, unsigned max_depth = 20);

}  // namespace mbpi
