#include "mbpi/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <sstream>

#include "mbpi/errors.hpp"

namespace mbpi {

namespace {

void check(double error, double l1, double rel_tol, double abs_tol) {
  if (!std::isfinite(error) || error > 100.0 * std::max(rel_tol * l1, abs_tol)) {
    std::ostringstream os;
    os << "quadrature did not converge: error estimate " << error << " against L1 norm " << l1;
    throw NumericError(os.str());
  }
}

}  // namespace

QuadratureResult integrate(const std::function<std::complex<double>(double)>& f, double a, double b,
                           double rel_tol, double abs_tol, unsigned max_depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  QuadratureResult out;
  out.value = GK::integrate(f, a, b, max_depth, rel_tol, &out.error, &out.l1);
  check(out.error, out.l1, rel_tol, abs_tol);
  return out;
}

double integrate_real(const std::function<double(double)>& f, double a, double b, double rel_tol, double abs_tol,
                      unsigned max_depth) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
  double error = 0.0, l1 = 0.0;
  const double value = GK::integrate(f, a, b, max_depth, rel_tol, &error, &l1);
  check(error, l1, rel_tol, abs_tol);
  return value;
}

}  // namespace mbpi
