#include "mbpi/invariants.hpp"

#include <algorithm>
#include <boost/math/distributions/binomial.hpp>
#include <cmath>
#include <sstream>

#include "mbpi/errors.hpp"
#include "mbpi/quadrature.hpp"

namespace mbpi {

namespace {

void require_closed_form(const ModelSpec& model, const char* what) {
  if (!model.closed_form()) {
    throw PreconditionError(std::string(what) + " needs a closed-form law pair (truncated laws have finite variance)");
  }
}

void require_limit_argument(cplx s) {
  if (std::abs(s) >= 1.0 && s != cplx(1.0, 0.0)) throw DomainError("limit generating functions need |s| < 1 or s = 1");
}

// int_s^1 h(u) du written in y = (1-s) e^{-theta}, theta in [0, inf)
cplx half_line(const std::function<cplx(cplx)>& integrand, cplx s, double rel_tol) {
  if (s == cplx(1.0, 0.0)) return 0.0;
  const cplx y0 = 1.0 - s;
  return integrate([&](double theta) { return integrand(y0 * std::exp(-theta)); }, 0.0, INFINITY, rel_tol, 1e-300)
      .value;
}

}  // namespace

cplx log_U(const ModelSpec& model, cplx s, double rel_tol) {
  model.require_recurrent();
  require_closed_form(model, "U(s)");
  require_limit_argument(s);
  return half_line([&](cplx y) { return model.log_integrand(y); }, s, rel_tol);
}

cplx compute_U(const ModelSpec& model, cplx s, double rel_tol) { return std::exp(log_U(model, s, rel_tol)); }

cplx log_B(const ModelSpec& model, cplx s, double rel_tol) {
  model.require_transient_ready();
  require_closed_form(model, "B(s)");
  require_limit_argument(s);
  return half_line([&](cplx y) { return model.regularized_integrand(y); }, s, rel_tol);
}

double compute_B(const ModelSpec& model, double s, double rel_tol) {
  return std::exp(log_B(model, s, rel_tol).real());
}

cplx log_pi(const ModelSpec& model, cplx s, double rel_tol) {
  const cplx lb = log_B(model, s, rel_tol);
  if (s == cplx(1.0, 0.0)) throw DomainError("pi(s) is unbounded at s = 1");
  return std::pow(1.0 - s, model.gamma()) + lb;
}

double compute_pi(const ModelSpec& model, double s, double rel_tol) {
  return std::exp(log_pi(model, s, rel_tol).real());
}

const char* to_string(MeasureKind kind) {
  return kind == MeasureKind::kDistributionU ? "distribution_U" : "measure_pi";
}

double InvariantMeasure::sum() const {
  long double acc = 0.0L;
  for (double v : coefficients) acc += v;
  return static_cast<double>(acc);
}

double InvariantMeasure::entry_bound(int j) const {
  return aliasing_bound + sample_accuracy * max_modulus * std::pow(radius, -j);
}

InvariantMeasure extract_measure(const ModelSpec& model, MeasureKind kind, const InversionSettings& settings,
                                 int threads) {
  constexpr double kQuadTol = 1e-12;
  std::function<cplx(cplx)> gf;
  if (kind == MeasureKind::kDistributionU) {
    model.require_recurrent();
    gf = [&](cplx s) { return compute_U(model, s, kQuadTol); };
  } else {
    model.require_transient_ready();
    gf = [&](cplx s) { return std::exp(log_pi(model, s, kQuadTol)); };
  }
  require_closed_form(model, "extract_measure");
  const double accuracy = 10.0 * kQuadTol;
  auto raw = settings;
  raw.clamp_negative = false;
  const auto series = invert_on_circle(gf, raw, accuracy, threads);
  InvariantMeasure out;
  out.kind = kind;
  out.coefficients = series.values;
  out.radius = series.radius;
  out.samples = series.samples;
  out.aliasing_bound = series.aliasing_bound;
  out.roundoff_bound = series.roundoff_bound;
  out.max_modulus = series.max_modulus;
  out.sample_accuracy = accuracy;
  return out;
}

InvarianceReport check_invariance(const InvariantMeasure& measure, const ModelSpec& model, double tau, int i_max,
                                  int j_max, const InversionSettings& rows, const KernelOptions& opts, int threads) {
  if (!(tau > 0.0)) throw DomainError("check_invariance needs tau > 0");
  if (i_max < 1) throw DomainError("check_invariance needs i_max >= 1");
  if (j_max < 0) j_max = i_max / 2;
  if (static_cast<int>(measure.coefficients.size()) <= i_max) {
    throw DomainError("measure has fewer coefficients than rows requested");
  }
  if (rows.j_out <= j_max) throw DomainError("row inversion must cover j <= j_max");

  const auto matrix = transition_rows(model, i_max, tau, rows, opts, threads);
  InvarianceReport report;
  report.tau = tau;
  report.i_max = i_max;
  report.j_max = j_max;
  report.row_aliasing_bound = matrix.aliasing_bound;
  report.row_roundoff_bound = matrix.roundoff_bound;
  const auto& m = measure.coefficients;
  for (int j = 0; j <= j_max; ++j) {
    long double acc = 0.0L;
    for (int i = 0; i <= i_max; ++i) acc += static_cast<long double>(m[i]) * matrix.rows[i][j];
    const double r = std::fabs(static_cast<double>(acc) - m[j]);
    report.residuals.push_back(r);
    if (r > report.max_residual) {
      report.max_residual = r;
      report.argmax = j;
    }
    report.measure_bound = std::max(report.measure_bound, measure.entry_bound(j));
  }

  const double survive = solve_F(model, tau, 0.0, opts).R.real();
  const auto below = [&](int i) {
    return boost::math::cdf(boost::math::binomial_distribution<double>(i, survive), static_cast<double>(j_max));
  };
  double tail = 0.0;
  const int n = static_cast<int>(m.size());
  for (int i = i_max + 1; i < n; ++i) tail += std::max(m[i], 0.0) * below(i);
  if (measure.kind == MeasureKind::kDistributionU) {
    // mass beyond the extracted coefficients
    const double rest = std::max(0.0, 1.0 - measure.sum()) + n * measure.entry_bound(n - 1);
    tail += rest * below(n);
  }
  report.tail_bound = tail;
  return report;
}

RatioTable ratio_limits(const ModelSpec& model, int j_max, const std::vector<double>& t_grid,
                        const InversionSettings& settings, const KernelOptions& opts, int threads) {
  if (j_max < 0) throw DomainError("ratio_limits needs j_max >= 0");
  if (t_grid.empty() || !std::is_sorted(t_grid.begin(), t_grid.end()) ||
      std::adjacent_find(t_grid.begin(), t_grid.end()) != t_grid.end()) {
    throw DomainError("ratio_limits needs an increasing t grid");
  }
  if (settings.j_out <= j_max) throw DomainError("inversion must cover j <= j_max");
  RatioTable table;
  table.t_grid = t_grid;
  table.j_max = j_max;
  for (double t : t_grid) {
    const auto row = transition_probs(model, 0, t, settings, opts, threads);
    const double p00 = row.values[0];
    if (!(p00 > 1e-250)) {
      std::ostringstream os;
      os << "p_00(" << t << ") = " << p00 << " is below the numeric floor";
      throw NumericError(os.str());
    }
    std::vector<double> ratios(j_max + 1);
    for (int j = 0; j <= j_max; ++j) ratios[j] = row.values[j] / p00;
    table.p00.push_back(p00);
    table.ratios.push_back(std::move(ratios));
  }

  try {
    const auto kind = model.gamma() > 0.0 ? MeasureKind::kDistributionU : MeasureKind::kMeasurePi;
    const auto measure = extract_measure(model, kind, settings, threads);
    for (int j = 0; j <= j_max; ++j) table.limits.push_back(measure.coefficients[j] / measure.coefficients[0]);
  } catch (const PreconditionError&) {
    table.limits.clear();
  }

  if (!table.limits.empty()) {
    table.monotone = true;
    for (int j = 1; j <= j_max; ++j) {
      for (std::size_t k = 1; k < table.ratios.size(); ++k) {
        const double before = std::fabs(table.ratios[k - 1][j] - table.limits[j]);
        const double after = std::fabs(table.ratios[k][j] - table.limits[j]);
        if (after > before + 1e-12) table.monotone = false;
      }
    }
  }
  return table;
}

}  // namespace mbpi
