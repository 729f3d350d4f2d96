#pragma once

#include <string>
#include <vector>

#include "mbpi/kernel.hpp"
#include "mbpi/laws.hpp"
#include "mbpi/slowly_varying.hpp"

namespace mbpi {

struct FitOptions {
  double slope_tol = 0.1;
  double r2_min = 0.99;
  // fit window: t >= t_max / 10^decades
  double decades = 2.0;
  // points with error <= floor_factor * floor are dropped
  double floor_factor = 10.0;
};

struct RateFit {
  std::string label;
  std::vector<double> t_grid;
  std::vector<double> errors;
  std::vector<double> floors;     // numeric error floor per point
  std::vector<double> envelope;   // predicted leading term, when available
  std::vector<double> ratio;      // errors / envelope
  std::vector<bool> in_window;
  int points_used = 0;
  double fitted_slope = 0.0;
  double fitted_intercept = 0.0;
  double r_squared = 0.0;
  double predicted_slope = 0.0;
  double slope_tol = 0.0;
  double r2_min = 0.0;
  bool passed = false;

  double margin() const { return slope_tol - std::abs(fitted_slope - predicted_slope); }
  // e(t) t^{-predicted_slope} at the last grid point
  double compensated_last() const;
  std::string summary() const;
};

// n points per decade from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int per_decade);

// Least squares of ln e on ln t over the window. floors may be empty.
RateFit fit_rate(const std::vector<double>& t_grid, const std::vector<double>& errors,
                 const std::vector<double>& floors, double predicted_slope, const FitOptions& fit = {});

// |P(t;s)/U(s) - 1|, predicted slope -gamma/nu. gamma > 0.
RateFit rate_theorem1(const ModelSpec& model, double s, const std::vector<double>& t_grid, const FitOptions& fit = {},
                      const KernelOptions& opts = {}, int threads = 1);

// rho(t;s) = |e^{T(t)} P(t;s)/pi(s) - 1|, predicted slope -mu/nu.
RateFit rate_theorem2(const ModelSpec& model, double s, const std::vector<double>& t_grid, const FitOptions& fit = {},
                      const KernelOptions& opts = {}, int threads = 1);

// ln(e^{T(t)} P(t;s)), summed in log space.
double log_compensated_P(const ModelSpec& model, double t, double s, const KernelOptions& opts = {});

struct UniformityReport {
  std::vector<double> s_grid;
  std::vector<double> t_grid;
  std::vector<std::vector<double>> ratio;  // ratio[k][m] = rho(t_k; s_m) / rho(t_k; 0)
  double max_ratio = 0.0;
  double bound = 10.0;
  bool passed = false;
};

// max over s of rho(t;s)/rho(t;0) over the fit window of t_grid.
UniformityReport theorem2_uniformity(const ModelSpec& model, const std::vector<double>& s_grid,
                                     const std::vector<double>& t_grid, const FitOptions& fit = {},
                                     double bound = 10.0, const KernelOptions& opts = {}, int threads = 1);

struct CorollaryFit {
  RateFit fit;
  double B0 = 0.0;
  double pi0 = 0.0;
  std::vector<double> scaled_p00;  // e^{T(t)} p_00(t)
};

// |e^{T(t)} p_00(t) / pi(0) - 1| with pi(0) = e B(0).
CorollaryFit rate_corollary1(const ModelSpec& model, const std::vector<double>& t_grid, const FitOptions& fit = {},
                             const KernelOptions& opts = {}, int threads = 1);

// Tabular report shared by the lemma checks.
struct LemmaReport {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  double statistic = 0.0;  // the quantity compared against bound
  double bound = 0.0;
  bool passed = false;
  std::string note;
};

// Relative deviation between 1/R(t;s) and (nu t)^{1/nu}/N(t) [1 + M(s)/t]^{1/nu}.
// Passes when the deviation decreases along t for every s and ends below final_tol.
LemmaReport check_lemma1(const ModelSpec& model, const std::vector<double>& s_grid, const std::vector<double>& t_grid,
                         double final_tol = 1e-3, const KernelOptions& opts = {});

// |1/Lambda(R(t;s)) - 1/Lambda(1-s) - nu t| / ln nu(t;s); passes when the sup
// over the top decade is at most bound.
LemmaReport check_lemma2(const ModelSpec& model, double s, const std::vector<double>& t_grid, double bound = 10.0,
                         const KernelOptions& opts = {});

// sigma t^sigma / L(t) int_t^inf y^{-(1+sigma)} L(y) dy against 1, scaled by
// spec.remainder. The integral is taken over the whole half-line.
LemmaReport check_lemma3(const SlowlyVaryingSpec& spec, double sigma, const std::vector<double>& t_grid,
                         double bound = 2.0);

// int_x^1 g/f du against (1/gamma) g(x)/Lambda(1-x); |ratio - 1| / Lambda(1-x)
// over x >= x_asym must stay below bound.
LemmaReport check_lemma4(const ModelSpec& model, const std::vector<double>& x_grid, double bound = 10.0,
                         double x_asym = 0.9);

}  // namespace mbpi
