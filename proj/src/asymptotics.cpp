#include "mbpi/asymptotics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <sstream>

#include "mbpi/errors.hpp"
#include "mbpi/invariants.hpp"
#include "mbpi/parallel.hpp"
#include "mbpi/quadrature.hpp"
#include "mbpi/rvcalc.hpp"

namespace mbpi {

namespace {

void require_grid(const std::vector<double>& t_grid) {
  if (t_grid.empty()) throw DomainError("empty t grid");
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (t_grid[k] < 0.0 || (k > 0 && !(t_grid[k] > t_grid[k - 1]))) throw DomainError("t grid must be increasing and >= 0");
  }
}

struct LogPoint {
  double log_p = 0.0;
  double floor = 0.0;
};

// ln P(t;s) with an absolute error floor for it.
LogPoint log_P_point(const ModelSpec& model, double t, double s, const KernelOptions& opts) {
  const auto v = compute_P(model, t, s, opts);
  return {v.log_P.real(), v.error_estimate * std::max(1.0, std::fabs(v.log_P.real()))};
}

}  // namespace

double RateFit::compensated_last() const {
  if (errors.empty()) return 0.0;
  return errors.back() * std::pow(t_grid.back(), -predicted_slope);
}

std::string RateFit::summary() const {
  std::ostringstream os;
  os << std::fixed << std::setprecision(3) << label << " slope " << fitted_slope << " (predicted " << predicted_slope
     << ") " << (passed ? "PASS" : "FAIL");
  return os.str();
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  if (!(lo > 0.0 && hi >= lo) || per_decade < 1) throw DomainError("log_grid needs 0 < lo <= hi, per_decade >= 1");
  const double a = std::log10(lo), b = std::log10(hi);
  const int n = static_cast<int>(std::round((b - a) * per_decade));
  std::vector<double> out;
  for (int k = 0; k <= n; ++k) out.push_back(std::pow(10.0, a + (b - a) * k / std::max(n, 1)));
  if (n == 0) out.resize(1);
  return out;
}

RateFit fit_rate(const std::vector<double>& t_grid, const std::vector<double>& errors,
                 const std::vector<double>& floors, double predicted_slope, const FitOptions& fit) {
  require_grid(t_grid);
  if (errors.size() != t_grid.size() || (!floors.empty() && floors.size() != t_grid.size())) {
    throw DomainError("fit_rate: grid, errors and floors must have equal length");
  }
  RateFit out;
  out.t_grid = t_grid;
  out.errors = errors;
  out.floors = floors.empty() ? std::vector<double>(t_grid.size(), 0.0) : floors;
  out.predicted_slope = predicted_slope;
  out.slope_tol = fit.slope_tol;
  out.r2_min = fit.r2_min;
  const double lo = t_grid.back() / std::pow(10.0, fit.decades);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    const bool use = t_grid[k] > 0.0 && t_grid[k] >= lo * (1.0 - 1e-12) && errors[k] > 0.0 &&
                     std::isfinite(errors[k]) && errors[k] > fit.floor_factor * out.floors[k];
    out.in_window.push_back(use);
    if (use) {
      xs.push_back(std::log(t_grid[k]));
      ys.push_back(std::log(errors[k]));
    }
  }
  out.points_used = static_cast<int>(xs.size());
  if (xs.size() < 3) return out;
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    mx += xs[k];
    my += ys[k];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    sxx += (xs[k] - mx) * (xs[k] - mx);
    sxy += (xs[k] - mx) * (ys[k] - my);
    syy += (ys[k] - my) * (ys[k] - my);
  }
  out.fitted_slope = sxy / sxx;
  out.fitted_intercept = my - out.fitted_slope * mx;
  out.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  out.passed = std::fabs(out.fitted_slope - predicted_slope) <= fit.slope_tol && out.r_squared >= fit.r2_min;
  return out;
}

RateFit rate_theorem1(const ModelSpec& model, double s, const std::vector<double>& t_grid, const FitOptions& fit,
                      const KernelOptions& opts, int threads) {
  model.require_recurrent();
  if (!(s >= 0.0 && s <= 0.95)) throw DomainError("rate_theorem1 needs s in [0, 0.95]");
  require_grid(t_grid);
  const double log_u = log_U(model, s).real();
  if (!(std::exp(log_u) > 1e-300)) throw NumericError("U(s) below the numeric floor");
  const auto ctx = RVContext::from_model(model);
  const double nu = model.nu(), gamma = model.gamma();

  const std::size_t n = t_grid.size();
  std::vector<double> errors(n), floors(n), envelope(n), ratio(n);
  parallel_for(n, threads, [&](std::size_t k) {
    const double t = t_grid[k];
    const auto p = log_P_point(model, t, s, opts);
    errors[k] = std::fabs(std::expm1(p.log_p - log_u));
    floors[k] = p.floor + 1e-12 * std::max(1.0, std::fabs(log_u));
    if (t > 0.0) {
      const double lam = lambda_shift(ctx, t, s).lambda;
      envelope[k] = std::pow(lam, -gamma / nu) / gamma * ctx.K(std::max(1.0, tau(ctx, t)));
      ratio[k] = errors[k] / envelope[k];
    }
  });
  auto out = fit_rate(t_grid, errors, floors, -gamma / nu, fit);
  out.label = "theorem1";
  out.envelope = std::move(envelope);
  out.ratio = std::move(ratio);
  return out;
}

double log_compensated_P(const ModelSpec& model, double t, double s, const KernelOptions& opts) {
  const auto ctx = RVContext::from_model(model);
  return compute_P(model, t, s, opts).log_P.real() + T_big(ctx, t);
}

RateFit rate_theorem2(const ModelSpec& model, double s, const std::vector<double>& t_grid, const FitOptions& fit,
                      const KernelOptions& opts, int threads) {
  model.require_transient_ready();
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("rate_theorem2 needs s in [0,1)");
  require_grid(t_grid);
  const double lpi = log_pi(model, s).real();
  const auto ctx = RVContext::from_model(model);
  const std::size_t n = t_grid.size();
  std::vector<double> errors(n), floors(n);
  parallel_for(n, threads, [&](std::size_t k) {
    const double t = t_grid[k];
    if (t == 0.0) {
      errors[k] = std::fabs(std::expm1(-lpi));
      return;
    }
    const auto p = log_P_point(model, t, s, opts);
    const double T = T_big(ctx, t);
    errors[k] = std::fabs(std::expm1(p.log_p + T - lpi));
    floors[k] = p.floor + 1e-12 * std::max(1.0, T);
  });
  auto out = fit_rate(t_grid, errors, floors, -model.mu() / model.nu(), fit);
  out.label = "theorem2";
  return out;
}

UniformityReport theorem2_uniformity(const ModelSpec& model, const std::vector<double>& s_grid,
                                     const std::vector<double>& t_grid, const FitOptions& fit, double bound,
                                     const KernelOptions& opts, int threads) {
  if (s_grid.empty()) throw DomainError("theorem2_uniformity needs a nonempty s grid");
  const auto base = rate_theorem2(model, 0.0, t_grid, fit, opts, threads);
  UniformityReport out;
  out.s_grid = s_grid;
  out.bound = bound;
  std::vector<RateFit> fits;
  for (double s : s_grid) fits.push_back(rate_theorem2(model, s, t_grid, fit, opts, threads));
  for (std::size_t k = 0; k < t_grid.size(); ++k) {
    if (!base.in_window[k]) continue;
    out.t_grid.push_back(t_grid[k]);
    std::vector<double> row;
    for (const auto& f : fits) {
      const double r = f.errors[k] / base.errors[k];
      row.push_back(r);
      out.max_ratio = std::max(out.max_ratio, r);
    }
    out.ratio.push_back(std::move(row));
  }
  out.passed = !out.t_grid.empty() && out.max_ratio <= bound;
  return out;
}

CorollaryFit rate_corollary1(const ModelSpec& model, const std::vector<double>& t_grid, const FitOptions& fit,
                             const KernelOptions& opts, int threads) {
  model.require_transient_ready();
  require_grid(t_grid);
  CorollaryFit out;
  out.B0 = compute_B(model, 0.0);
  out.pi0 = compute_pi(model, 0.0);
  const double lpi = std::log(out.pi0);
  const auto ctx = RVContext::from_model(model);
  const std::size_t n = t_grid.size();
  std::vector<double> errors(n), floors(n);
  out.scaled_p00.resize(n);
  parallel_for(n, threads, [&](std::size_t k) {
    const double t = t_grid[k];
    if (!(t > 0.0)) throw DomainError("rate_corollary1 needs t > 0");
    // p_00(t) = P(t;0)
    const auto p = log_P_point(model, t, 0.0, opts);
    const double T = T_big(ctx, t);
    out.scaled_p00[k] = std::exp(p.log_p + T);
    errors[k] = std::fabs(std::expm1(p.log_p + T - lpi));
    floors[k] = p.floor + 1e-12 * std::max(1.0, T);
  });
  out.fit = fit_rate(t_grid, errors, floors, -model.mu() / model.nu(), fit);
  out.fit.label = "corollary1";
  return out;
}

LemmaReport check_lemma1(const ModelSpec& model, const std::vector<double>& s_grid, const std::vector<double>& t_grid,
                         double final_tol, const KernelOptions& opts) {
  require_grid(t_grid);
  if (t_grid.front() <= 0.0) throw DomainError("check_lemma1 needs t > 0");
  const auto ctx = RVContext::from_model(model);
  const double nu = model.nu();
  LemmaReport out;
  out.name = "lemma1";
  out.columns = {"s", "t", "inv_R", "approximation", "deviation"};
  out.bound = final_tol;
  bool decreasing = true;
  for (double s : s_grid) {
    const double M = M_gf(ctx, s);
    double last = INFINITY;
    for (double t : t_grid) {
      const double inv_r = 1.0 / solve_F(model, t, s, opts).R.real();
      const double approx = std::pow(nu * t, 1.0 / nu) / script_N(ctx, t) * std::pow(1.0 + M / t, 1.0 / nu);
      const double dev = std::fabs(approx / inv_r - 1.0);
      out.rows.push_back({s, t, inv_r, approx, dev});
      if (dev > last * (1.0 + 1e-9)) decreasing = false;
      last = dev;
    }
    out.statistic = std::max(out.statistic, last);
  }
  out.passed = decreasing && out.statistic <= final_tol;
  out.note = decreasing ? "deviation decreasing in t for every s" : "deviation not monotone in t";
  return out;
}

LemmaReport check_lemma2(const ModelSpec& model, double s, const std::vector<double>& t_grid, double bound,
                         const KernelOptions& opts) {
  require_grid(t_grid);
  if (!(s >= 0.0 && s < 1.0)) throw DomainError("check_lemma2 needs s in [0,1)");
  const double nu = model.nu();
  const double lam_s = model.lambda(1.0 - s).real();
  LemmaReport out;
  out.name = "lemma2";
  out.columns = {"t", "remainder", "ln_nu", "scaled"};
  out.bound = bound;
  const double top = t_grid.back() / 10.0;
  for (double t : t_grid) {
    const auto v = solve_F(model, t, s, opts);
    const double lam_r = model.lambda(v.R).real();
    const double remainder = std::fabs(1.0 / lam_r - 1.0 / lam_s - nu * t);
    const double ln_nu = std::log(lam_s * nu * t + 1.0);
    const double scaled = ln_nu > 0.0 ? remainder / ln_nu : 0.0;
    out.rows.push_back({t, remainder, ln_nu, scaled});
    if (t >= top) out.statistic = std::max(out.statistic, scaled);
  }
  out.passed = std::isfinite(out.statistic) && out.statistic <= bound;
  return out;
}

LemmaReport check_lemma3(const SlowlyVaryingSpec& spec, double sigma, const std::vector<double>& t_grid, double bound) {
  if (!(sigma > 0.0)) throw DomainError("check_lemma3 needs sigma > 0");
  require_grid(t_grid);
  if (t_grid.front() < 1.0) throw DomainError("check_lemma3 needs t >= 1");
  LemmaReport out;
  out.name = "lemma3";
  out.columns = {"t", "ratio", "remainder", "scaled"};
  out.bound = bound;
  for (double t : t_grid) {
    // y = t e^x
    const double scaled_integral =
        integrate_real([&](double x) { return std::exp(-sigma * x) * spec(t * std::exp(x)); }, 0.0, INFINITY, 1e-12);
    const double ratio = sigma * scaled_integral / spec(t);
    const double rem = spec.remainder(t);
    const double scaled = std::fabs(ratio - 1.0) / rem;
    out.rows.push_back({t, ratio, rem, scaled});
    out.statistic = std::max(out.statistic, scaled);
  }
  out.passed = out.statistic <= bound;
  return out;
}

LemmaReport check_lemma4(const ModelSpec& model, const std::vector<double>& x_grid, double bound, double x_asym) {
  model.require_recurrent();
  if (x_grid.empty()) throw DomainError("check_lemma4 needs a nonempty x grid");
  LemmaReport out;
  out.name = "lemma4";
  out.columns = {"x", "integral", "approximation", "ratio", "scaled"};
  out.bound = bound;
  const double gamma = model.gamma();
  for (double x : x_grid) {
    if (!(x >= 0.0 && x < 1.0)) throw DomainError("check_lemma4 needs x in [0,1)");
    const double integral = log_U(model, x).real();
    const double y = 1.0 - x;
    const double lam = model.lambda(y).real();
    const double approx = model.g_one_minus(y).real() / lam / gamma;
    const double ratio = integral / approx;
    const double scaled = std::fabs(ratio - 1.0) / lam;
    out.rows.push_back({x, integral, approx, ratio, scaled});
    if (x >= x_asym) out.statistic = std::max(out.statistic, scaled);
  }
  out.passed = out.statistic <= bound;
  return out;
}

}  // namespace mbpi
