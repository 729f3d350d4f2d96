#include "mbpi/kernel.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <sstream>

#include "fft.hpp"
#include "mbpi/errors.hpp"
#include "mbpi/parallel.hpp"
#include "mbpi/quadrature.hpp"

namespace mbpi {

namespace {

namespace odeint = boost::numeric::odeint;
using State = std::array<double, 4>;

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_disc(cplx s) {
  if (std::abs(s) > 1.0 + 1e-12) throw DomainError("generating function argument outside the closed unit disc");
}

// Integrates w = ln R and, for the time route, psi = int_0^u g(F) du.
struct Trajectory {
  cplx w;
  cplx psi;
  long steps;
};

Trajectory integrate_backward(const ModelSpec& model, double t, cplx s, bool carry_psi, const KernelOptions& opts) {
  const cplx w0 = std::log(1.0 - s);
  State x{w0.real(), w0.imag(), 0.0, 0.0};
  auto system = [&](const State& in, State& out, double) {
    const cplx R = std::exp(cplx(in[0], in[1]));
    const cplx dw = -model.lambda(R);
    out[0] = dw.real();
    out[1] = dw.imag();
    if (carry_psi) {
      const cplx dpsi = model.g_one_minus(R);
      out[2] = dpsi.real();
      out[3] = dpsi.imag();
    } else {
      out[2] = out[3] = 0.0;
    }
  };

  auto stepper = odeint::make_controlled(opts.abs_tol, opts.rel_tol, odeint::runge_kutta_dopri5<State>());
  const double rate = std::max(1.0, std::abs(model.lambda(1.0 - s)));
  double time = 0.0;
  double dt = std::min(t, 1e-2 / rate);
  long steps = 0;
  while (t - time > 1e-14 * std::max(1.0, t)) {
    if (time + dt > t) dt = t - time;
    const auto result = stepper.try_step(system, x, time, dt);
    if (result == odeint::success) {
      if (++steps > opts.max_steps) throw NumericError("backward equation: step budget exhausted");
    } else if (dt < 1e-15 * std::max(1.0, time)) {
      std::ostringstream os;
      os << "backward equation: step size underflow at t=" << time << " (s=" << s << ")";
      throw NumericError(os.str());
    }
  }
  for (double v : x) {
    if (!std::isfinite(v)) throw NumericError("backward equation: non-finite state");
  }
  return {cplx(x[0], x[1]), cplx(x[2], x[3]), steps};
}

}  // namespace

cplx log_one_minus(cplx r) {
  if (std::abs(r) < 1e-3) {
    cplx term = r;
    cplx acc = 0.0;
    for (int k = 1; k <= 8; ++k) {
      acc -= term / static_cast<double>(k);
      term *= r;
    }
    return acc;
  }
  return std::log(1.0 - r);
}

GFValue solve_F(const ModelSpec& model, double t, cplx s, const KernelOptions& opts) {
  require_disc(s);
  if (t < 0.0) throw DomainError("solve_F needs t >= 0");
  if (!(opts.rel_tol > 0.0)) throw DomainError("solve_F needs tol > 0");
  GFValue out;
  out.t = t;
  out.s = s;
  if (s == cplx(1.0, 0.0)) return out;
  if (t == 0.0) {
    out.F = s;
    out.R = 1.0 - s;
    out.log_R = std::log(out.R);
    return out;
  }
  const auto traj = integrate_backward(model, t, s, false, opts);
  out.log_R = traj.w;
  out.R = std::exp(traj.w);
  out.F = 1.0 - out.R;
  out.steps = traj.steps;
  out.error_estimate = opts.rel_tol * std::max(1.0, std::abs(traj.w)) * std::abs(out.R);
  return out;
}

GFValue compute_P(const ModelSpec& model, double t, cplx s, const KernelOptions& opts) {
  require_disc(s);
  if (t < 0.0) throw DomainError("compute_P needs t >= 0");
  if (s == cplx(1.0, 0.0) || t == 0.0) return solve_F(model, t, s, opts);

  GFValue out;
  out.t = t;
  out.s = s;
  const bool time_route = opts.route == PRoute::kTimeIntegral;
  const auto traj = integrate_backward(model, t, s, time_route, opts);
  out.log_R = traj.w;
  out.R = std::exp(traj.w);
  out.F = 1.0 - out.R;
  out.steps = traj.steps;
  double quad_error = 0.0;
  if (time_route) {
    out.log_P = traj.psi;
    quad_error = opts.rel_tol * std::max(1.0, std::abs(traj.psi));
  } else {
    // u = 1 - e^{-v}, straight segment in v from -ln(1-s) to -ln R.
    const cplx w0 = std::log(1.0 - s);
    const cplx dw = traj.w - w0;
    const auto q = integrate([&](double theta) { return model.log_integrand(std::exp(w0 + theta * dw)); }, 0.0, 1.0,
                             opts.quad_rel_tol, 1e-300);
    out.log_P = -dw * q.value;
    quad_error = std::abs(dw) * q.error;
  }
  out.P = std::exp(out.log_P);
  out.error_estimate = quad_error + opts.rel_tol * std::max(1.0, std::abs(traj.w));
  return out;
}

GFValue compute_P_i(const ModelSpec& model, int i, double t, cplx s, const KernelOptions& opts) {
  if (i < 0) throw DomainError("compute_P_i needs i >= 0");
  GFValue out = compute_P(model, t, s, opts);
  if (i == 0) return out;
  if (out.F == cplx(0.0, 0.0)) {
    out.P = 0.0;
    out.log_P = cplx(-INFINITY, 0.0);
    return out;
  }
  out.log_P += static_cast<double>(i) * log_one_minus(out.R);
  out.P = std::exp(out.log_P);
  return out;
}

double CoefficientSeries::sum() const {
  long double acc = 0.0L;
  for (double v : values) acc += v;
  return static_cast<double>(acc);
}

double CoefficientSeries::entry_bound(int j, double sample_accuracy) const {
  if (j < 0 || j >= static_cast<int>(values.size())) throw DomainError("entry_bound index out of range");
  return aliasing_bound + sample_accuracy * max_modulus * std::pow(radius, -j);
}

void require_inversion_settings(const InversionSettings& settings) {
  if (!(settings.radius > 0.0 && settings.radius < 1.0)) throw DomainError("inversion radius must lie in (0,1)");
  if (settings.j_out < 1) throw DomainError("inversion needs j_out >= 1");
  const int m = settings.samples;
  if (m < 4 || (m & (m - 1)) != 0) throw DomainError("inversion sample count must be a power of two");
  if (m < 4 * settings.j_out) throw DomainError("inversion needs samples >= 4 * j_out");
}

namespace {

// Fills the lower half of the circle by conjugate symmetry.
std::vector<cplx> full_circle(std::span<const cplx> upper, int m) {
  std::vector<cplx> all(m);
  for (int k = 0; k <= m / 2; ++k) all[k] = upper[k];
  for (int k = m / 2 + 1; k < m; ++k) all[k] = std::conj(upper[m - k]);
  return all;
}

CoefficientSeries coefficients_from_circle(std::vector<cplx> samples, double radius, int j_out,
                                           double sample_accuracy) {
  const int m = static_cast<int>(samples.size());
  double max_abs = 0.0;
  for (const auto& v : samples) max_abs = std::max(max_abs, std::abs(v));
  std::vector<cplx> spectrum(m);
  forward_dft(samples, spectrum);
  CoefficientSeries out;
  out.values.resize(j_out);
  out.radius = radius;
  out.samples = m;
  for (int j = 0; j < j_out; ++j) {
    out.values[j] = spectrum[j].real() / m * std::pow(radius, -j);
  }
  out.max_modulus = max_abs;
  out.aliasing_bound = std::pow(radius, m) / (1.0 - radius) * max_abs;
  out.roundoff_bound = sample_accuracy * max_abs * std::pow(radius, -(j_out - 1));
  return out;
}

void finish(CoefficientSeries& series, const InversionSettings& settings) {
  for (double& v : series.values) {
    if (v < 0.0) {
      series.clamp_magnitude = std::max(series.clamp_magnitude, -v);
      if (settings.clamp_negative) v = 0.0;
    }
  }
  if (series.aliasing_bound > settings.tolerance) {
    std::ostringstream os;
    os << "aliasing bound " << series.aliasing_bound << " exceeds tolerance " << settings.tolerance
       << "; raise the sample count or shrink the radius";
    throw NumericError(os.str());
  }
}

}  // namespace

CoefficientSeries invert_on_circle(const std::function<cplx(cplx)>& gf, const InversionSettings& settings,
                                   double sample_accuracy, int threads) {
  require_inversion_settings(settings);
  const int m = settings.samples;
  std::vector<cplx> upper(m / 2 + 1);
  parallel_for(upper.size(), threads, [&](std::size_t k) {
    upper[k] = gf(std::polar(settings.radius, 2.0 * kPi * static_cast<double>(k) / m));
  });
  auto series = coefficients_from_circle(full_circle(upper, m), settings.radius, settings.j_out, sample_accuracy);
  finish(series, settings);
  return series;
}

CoefficientSeries transition_probs(const ModelSpec& model, int i, double t, const InversionSettings& settings,
                                   const KernelOptions& opts, int threads) {
  if (i < 0) throw DomainError("transition_probs needs i >= 0");
  return invert_on_circle([&](cplx s) { return compute_P_i(model, i, t, s, opts).P; }, settings,
                          10.0 * opts.rel_tol, threads);
}

TransitionMatrix transition_rows(const ModelSpec& model, int i_max, double t, const InversionSettings& settings,
                                 const KernelOptions& opts, int threads) {
  require_inversion_settings(settings);
  if (i_max < 0) throw DomainError("transition_rows needs i_max >= 0");
  const int m = settings.samples;
  std::vector<cplx> F(m / 2 + 1), G(m / 2 + 1);
  parallel_for(F.size(), threads, [&](std::size_t k) {
    const auto v = compute_P(model, t, std::polar(settings.radius, 2.0 * kPi * static_cast<double>(k) / m), opts);
    F[k] = v.F;
    G[k] = v.P;
  });

  TransitionMatrix out;
  out.t = t;
  out.radius = settings.radius;
  out.samples = m;
  out.rows.reserve(i_max + 1);
  for (int i = 0; i <= i_max; ++i) {
    auto series = coefficients_from_circle(full_circle(G, m), settings.radius, settings.j_out, 10.0 * opts.rel_tol);
    finish(series, settings);
    out.aliasing_bound = std::max(out.aliasing_bound, series.aliasing_bound);
    out.roundoff_bound = std::max(out.roundoff_bound, series.roundoff_bound);
    out.rows.push_back(std::move(series.values));
    for (std::size_t k = 0; k < G.size(); ++k) G[k] *= F[k];
  }
  return out;
}

}  // namespace mbpi
