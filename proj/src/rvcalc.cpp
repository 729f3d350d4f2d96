#include "mbpi/rvcalc.hpp"

#include <algorithm>
#include <cmath>

#include "mbpi/errors.hpp"
#include "mbpi/quadrature.hpp"

namespace mbpi {

RVContext::RVContext(double nu, double delta, SlowlyVaryingSpec L, SlowlyVaryingSpec ell)
    : nu_(nu), delta_(delta), L_(std::move(L)), ell_(std::move(ell)) {
  if (!(nu_ > 0.0 && nu_ < 1.0) || !(delta_ > 0.0 && delta_ < 1.0)) {
    throw DomainError("nu and delta must lie in (0,1)");
  }
}

RVContext RVContext::from_model(const ModelSpec& model) {
  return RVContext(model.nu(), model.delta(), model.offspring().sv(), model.immigration().sv());
}

std::optional<double> RVContext::Lratio_limit() const {
  if (!L_.limit || !ell_.limit) return std::nullopt;
  return *ell_.limit / *L_.limit;
}

double RVContext::K(double x) const { return std::pow(L_(x), -delta_ / nu_) * ell_(x); }

std::optional<double> RVContext::K_limit() const {
  if (!L_.limit || !ell_.limit) return std::nullopt;
  return std::pow(*L_.limit, -delta_ / nu_) * *ell_.limit;
}

double Lambda(const RVContext& ctx, double y) {
  if (!(y > 0.0 && y <= 1.0)) throw DomainError("Lambda(y) needs y in (0,1]");
  return std::pow(y, ctx.nu()) * ctx.L()(1.0 / y);
}

LambdaShift lambda_shift(const RVContext& ctx, double t, double s) {
  if (t < 0.0) throw DomainError("lambda_shift needs t >= 0");
  if (!(s < 1.0) || s < 0.0) throw DomainError("lambda_shift needs s in [0,1)");
  const double lam = Lambda(ctx, 1.0 - s);
  return {ctx.nu() * t + 1.0 / lam, lam * ctx.nu() * t + 1.0};
}

double script_N(const RVContext& ctx, double t, double rel_tol, int max_iter) {
  if (!(t > 0.0)) throw DomainError("script_N needs t > 0");
  const double nu = ctx.nu();
  const double scale = std::pow(nu * t, 1.0 / nu);
  const auto map = [&](double n) { return std::pow(ctx.L()(std::max(1.0, scale / n)), -1.0 / nu); };
  double n = std::pow(ctx.L()(std::max(1.0, scale)), -1.0 / nu);
  double damping = 1.0;
  double last_step = INFINITY;
  for (int it = 0; it < max_iter; ++it) {
    const double next = (1.0 - damping) * n + damping * map(n);
    const double step = std::fabs(next - n);
    n = next;
    if (step <= rel_tol * std::fabs(n)) return n;
    if (step >= last_step) damping *= 0.5;
    last_step = step;
  }
  throw NumericError("script_N fixed-point iteration did not converge");
}

double tau(const RVContext& ctx, double t) { return std::pow(ctx.nu() * t, 1.0 / ctx.nu()) / script_N(ctx, t); }

double T_big(const RVContext& ctx, double t) {
  if (!(ctx.gamma() < 0.0)) throw PreconditionError("T(t) is defined for gamma < 0 only");
  return std::pow(tau(ctx, t), std::fabs(ctx.gamma()));
}

double M_gf(const RVContext& ctx, double s, double rel_tol) {
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("M(s) needs s in [0,1)");
  if (s == 0.0) return 0.0;
  const double nu = ctx.nu();
  // x = e^v
  const double upper = -std::log1p(-s);
  return integrate_real([&](double v) { return std::exp(nu * v) / ctx.L()(std::exp(v)); }, 0.0, upper, rel_tol);
}

double dLam(const RVContext& ctx, double y) {
  if (!(y > 0.0 && y < 1.0)) throw DomainError("dLam(y) needs y in (0,1)");
  const double h = y * 1e-6;
  const double up = std::min(y + h, 1.0);
  const double derivative = (Lambda(ctx, up) - Lambda(ctx, y - h)) / (up - (y - h));
  return y * derivative / Lambda(ctx, y) - ctx.nu();
}

double epsilon_remainder(const RVContext& ctx, double t) { return -dLam(ctx, 1.0 / t); }

SVRemainderReport check_sv_remainder(const SlowlyVaryingSpec& spec, const std::vector<double>& lambdas,
                                     const std::vector<double>& xs, double declared_bound) {
  if (lambdas.empty() || xs.empty()) throw DomainError("check_sv_remainder needs nonempty grids");
  if (!std::is_sorted(xs.begin(), xs.end())) throw DomainError("check_sv_remainder needs increasing xs");
  SVRemainderReport report;
  report.xs = xs;
  report.declared_bound = declared_bound;
  const double top = xs.back() / 10.0;
  for (double x : xs) {
    const double base = spec(x);
    const double alpha = spec.remainder(x);
    double worst = 0.0;
    for (double lam : lambdas) worst = std::max(worst, std::fabs(spec(lam * x) / base - 1.0));
    report.ratio_term.push_back(worst / alpha);
    if (spec.limit) report.limit_term.push_back(std::fabs(base - *spec.limit) / alpha);
    if (x >= top) {
      report.top_decade_ratio_max = std::max(report.top_decade_ratio_max, report.ratio_term.back());
      if (spec.limit) report.top_decade_limit_max = std::max(report.top_decade_limit_max, report.limit_term.back());
    }
  }
  report.passed = report.top_decade_ratio_max <= declared_bound && report.top_decade_limit_max <= declared_bound;
  return report;
}

}  // namespace mbpi
