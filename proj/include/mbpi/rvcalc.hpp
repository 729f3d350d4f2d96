#pragma once

#include <optional>
#include <vector>

#include "mbpi/laws.hpp"
#include "mbpi/slowly_varying.hpp"

namespace mbpi {

// Regular-variation context of a model: the indices and the two slowly
// varying factors, L for the offspring law and ell for immigration.
class RVContext {
 public:
  RVContext(double nu, double delta, SlowlyVaryingSpec L, SlowlyVaryingSpec ell);
  static RVContext from_model(const ModelSpec& model);

  double nu() const { return nu_; }
  double delta() const { return delta_; }
  double gamma() const { return delta_ - nu_; }
  double mu() const { return 2.0 * delta_ - nu_; }
  const SlowlyVaryingSpec& L() const { return L_; }
  const SlowlyVaryingSpec& ell() const { return ell_; }

  // ell(t) / L(t)
  double Lratio(double t) const { return ell_(t) / L_(t); }
  std::optional<double> Lratio_limit() const;
  // L^{-delta/nu}(x) ell(x)
  double K(double x) const;
  std::optional<double> K_limit() const;

 private:
  double nu_;
  double delta_;
  SlowlyVaryingSpec L_;
  SlowlyVaryingSpec ell_;
};

// y^nu L(1/y), 0 < y <= 1. Equals f(1-y)/y for the paired law.
double Lambda(const RVContext& ctx, double y);

struct LambdaShift {
  double lambda = 0.0;  // nu t + 1/Lambda(1-s)
  double nu_ts = 0.0;   // Lambda(1-s) nu t + 1
};

// The shift in the leading term of the recurrent-regime error. Lambda^{-1} is
// read as the reciprocal 1/Lambda(1-s).
LambdaShift lambda_shift(const RVContext& ctx, double t, double s);

// Fixed point N of N = L((nu t)^{1/nu} / N)^{-1/nu}, by damped iteration.
double script_N(const RVContext& ctx, double t, double rel_tol = 1e-12, int max_iter = 10000);

// (nu t)^{1/nu} / N(t)
double tau(const RVContext& ctx, double t);
// tau(t)^{|gamma|}; transient regime (gamma < 0) only.
double T_big(const RVContext& ctx, double t);

// int_1^{1/(1-s)} dx / (x^{1-nu} L(x)), s in [0,1).
double M_gf(const RVContext& ctx, double s, double rel_tol = 1e-10);

// y Lambda'(y) / Lambda(y) - nu, by central differences with step y * 1e-6.
// (This is the remainder usually written delta(y); renamed to avoid a clash
// with the immigration index.)
double dLam(const RVContext& ctx, double y);
// -dLam(1/t)
double epsilon_remainder(const RVContext& ctx, double t);

struct SVRemainderReport {
  std::vector<double> xs;
  std::vector<double> ratio_term;  // sup over lambda of |L(lambda x)/L(x) - 1| / alpha(x)
  std::vector<double> limit_term;  // |L(x) - C| / alpha(x); empty without a limit
  double top_decade_ratio_max = 0.0;
  double top_decade_limit_max = 0.0;
  double declared_bound = 0.0;
  bool passed = false;
};

// Empirical check of L(lambda x)/L(x) = 1 + O(alpha(x)) and L(x) = C + O(alpha(x)).
// Passes when both normalised terms stay below declared_bound over the top
// decade of xs.
SVRemainderReport check_sv_remainder(const SlowlyVaryingSpec& spec, const std::vector<double>& lambdas,
                                     const std::vector<double>& xs, double declared_bound = 10.0);

}  // namespace mbpi
