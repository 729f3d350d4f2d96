#pragma once

#include <functional>
#include <optional>
#include <string>

namespace mbpi {

// A function slowly varying at infinity together with the remainder rate of
// its ratio convergence: L(lambda x)/L(x) = 1 + O(alpha(x)).
struct SlowlyVaryingSpec {
  std::string name;
  std::function<double(double)> value;      // x >= 1
  std::optional<double> limit;              // L(x) -> limit, when it exists
  std::function<double(double)> remainder;  // alpha(x), positive decreasing

  double operator()(double x) const { return value(x); }

  // L(x) = c
  static SlowlyVaryingSpec constant(double c);
  // L(x) = c (1 + kappa x^{-exponent}), remainder x^{-exponent}
  static SlowlyVaryingSpec perturbed(double c, double kappa, double exponent);
  // L(x) = 1 + ln(x), declared remainder x^{-exponent}. Slowly varying but
  // without a power remainder; used by negative tests.
  static SlowlyVaryingSpec logarithmic(double declared_exponent = 0.5);

  // Parses "constant(c)", "perturbed(c,kappa,exponent)" or "log".
  static SlowlyVaryingSpec parse(const std::string& text);
};

}  // namespace mbpi
