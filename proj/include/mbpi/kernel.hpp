#pragma once

#include <complex>
#include <functional>
#include <span>
#include <vector>

#include "mbpi/laws.hpp"

namespace mbpi {

// How ln P(t;s) is obtained.
//   kSpaceIntegral: quadrature of g/f from s to F(t;s)
//   kTimeIntegral:  quadrature of g(F(u;s)) over u in [0,t], carried along
//                   with the ODE solve
enum class PRoute { kSpaceIntegral, kTimeIntegral };

struct KernelOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-14;
  double quad_rel_tol = 1e-12;
  PRoute route = PRoute::kSpaceIntegral;
  long max_steps = 2'000'000;
};

struct GFValue {
  cplx F{1.0, 0.0};
  cplx R{0.0, 0.0};
  cplx P{1.0, 0.0};
  cplx log_R{-INFINITY, 0.0};  // principal log of R
  cplx log_P{0.0, 0.0};
  double t = 0.0;
  cplx s{1.0, 0.0};
  double error_estimate = 0.0;
  long steps = 0;
};

// F(t;s) from dF/dt = f(F), F(0;s) = s, integrated as w = ln(1 - F) with
// dw/dt = -Lambda(e^w) by an adaptive Dormand-Prince 5(4) pair. P is left at 1.
GFValue solve_F(const ModelSpec& model, double t, cplx s, const KernelOptions& opts = {});

// F and P(t;s) = P_0(t;s).
GFValue compute_P(const ModelSpec& model, double t, cplx s, const KernelOptions& opts = {});

// P_i(t;s) = F(t;s)^i P(t;s); P and log_P of the result refer to P_i.
GFValue compute_P_i(const ModelSpec& model, int i, double t, cplx s, const KernelOptions& opts = {});

// log(1 - r) accurate for small |r|.
cplx log_one_minus(cplx r);

struct InversionSettings {
  int j_out = 512;
  double radius = 0.9;
  int samples = 1 << 14;
  // Largest acceptable aliasing bound.
  double tolerance = 1e-8;
  // negative entries set to 0 (magnitude kept in clamp_magnitude)
  bool clamp_negative = true;
};

// Power-series coefficients recovered from values on the circle |s| = r.
struct CoefficientSeries {
  std::vector<double> values;
  double radius = 0.0;
  int samples = 0;
  double max_modulus = 0.0;  // max |G| on the circle
  // r^M / (1 - r) * max |G| on the circle.
  double aliasing_bound = 0.0;
  // sample accuracy * max |G| * r^{-(J_out - 1)}: amplification of evaluation
  // error into the last coefficient.
  double roundoff_bound = 0.0;
  // Largest |negative entry| before clamping (0 when nothing was negative).
  double clamp_magnitude = 0.0;

  double sum() const;
  // Bound on the error of entry j from inversion alone.
  double entry_bound(int j, double sample_accuracy) const;
};

// Coefficients 0..j_out-1 of a generating function with real coefficients.
// gf is evaluated on the upper half of the circle (conjugate symmetry fills
// the rest), concurrently when threads > 1.
CoefficientSeries invert_on_circle(const std::function<cplx(cplx)>& gf, const InversionSettings& settings,
                                   double sample_accuracy, int threads = 1);

// p_{i,j}(t), j < j_out.
CoefficientSeries transition_probs(const ModelSpec& model, int i, double t, const InversionSettings& settings = {},
                                   const KernelOptions& opts = {}, int threads = 1);

// Rows p_{i,.}(t) for i = 0..i_max from a single set of circle samples.
struct TransitionMatrix {
  double t = 0.0;
  std::vector<std::vector<double>> rows;
  double radius = 0.0;
  int samples = 0;
  double aliasing_bound = 0.0;
  double roundoff_bound = 0.0;

  int size() const { return static_cast<int>(rows.size()); }
};

TransitionMatrix transition_rows(const ModelSpec& model, int i_max, double t, const InversionSettings& settings = {},
                                 const KernelOptions& opts = {}, int threads = 1);

void require_inversion_settings(const InversionSettings& settings);

}  // namespace mbpi
