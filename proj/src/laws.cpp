#include "mbpi/laws.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "keyvalue.hpp"
#include "mbpi/errors.hpp"

namespace mbpi {

namespace {

constexpr double kDiscSlack = 1e-12;

// y^p on the principal branch, with 0^p = 0 for p > 0.
cplx cpow(cplx y, double p) {
  if (y == cplx(0.0, 0.0)) return {0.0, 0.0};
  if (y.imag() == 0.0 && y.real() > 0.0) return {std::pow(y.real(), p), 0.0};
  return std::pow(y, p);
}

void require_open_unit(double x, const char* what) {
  if (!(x > 0.0 && x < 1.0)) {
    throw DomainError(std::string(what) + " must lie in (0,1); the boundary value 1 is not supported");
  }
}

std::string format_number(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

std::string join(std::span<const double> values) {
  std::ostringstream os;
  os.precision(17);
  for (size_t j = 0; j < values.size(); ++j) {
    if (j) os << ',';
    os << values[j];
  }
  return os.str();
}

}  // namespace

template <LawKind Kind>
IntensityLaw<Kind>::IntensityLaw(std::vector<double> coefficients, double index, SlowlyVaryingSpec sv,
                                 std::optional<StableForm> form, double tail_bound)
    : coefficients_(std::move(coefficients)),
      index_(index),
      sv_(std::move(sv)),
      form_(form),
      tail_bound_(tail_bound) {
  if (coefficients_.size() < 2) throw DomainError("an intensity law needs at least two coefficients");
  require_open_unit(index_, Kind == LawKind::kOffspring ? "nu" : "delta");
}

template <LawKind Kind>
cplx IntensityLaw<Kind>::series(cplx z) const {
  cplx acc = 0.0;
  for (auto it = coefficients_.rbegin(); it != coefficients_.rend(); ++it) acc = acc * z + *it;
  return acc;
}

template <LawKind Kind>
cplx IntensityLaw<Kind>::eval_one_minus(cplx y, EvalMode mode) const {
  if (!uses_closed_form(mode)) return series(1.0 - y);
  const StableForm& sf = *form_;
  const cplx yi = cpow(y, sf.index);
  if constexpr (Kind == LawKind::kOffspring) {
    return sf.scale * y * yi * (1.0 + sf.kappa * yi);
  } else {
    return -sf.scale * yi * (1.0 + sf.kappa * yi);
  }
}

template <LawKind Kind>
cplx IntensityLaw<Kind>::eval(cplx z, EvalMode mode) const {
  if (std::abs(z) > 1.0 + kDiscSlack) throw DomainError("generating function evaluated outside the closed unit disc");
  if (!uses_closed_form(mode)) return series(z);
  return eval_one_minus(1.0 - z, mode);
}

template <LawKind Kind>
double IntensityLaw<Kind>::eval(double s, EvalMode mode) const {
  if (std::abs(s) > 1.0 + kDiscSlack) throw DomainError("generating function evaluated outside the closed unit disc");
  if (!uses_closed_form(mode) || s > 1.0) return series(cplx(s, 0.0)).real();
  const StableForm& sf = *form_;
  const double y = 1.0 - s;
  const double yi = y > 0.0 ? std::pow(y, sf.index) : 0.0;
  if constexpr (Kind == LawKind::kOffspring) {
    return sf.scale * y * yi * (1.0 + sf.kappa * yi);
  } else {
    return -sf.scale * yi * (1.0 + sf.kappa * yi);
  }
}

template class IntensityLaw<LawKind::kOffspring>;
template class IntensityLaw<LawKind::kImmigration>;

std::vector<double> binomial_series(double alpha, int J) {
  if (J < 0) throw DomainError("truncation order must be nonnegative");
  std::vector<double> out(static_cast<size_t>(J) + 1);
  double c = 1.0;
  for (int j = 0; j <= J; ++j) {
    out[j] = c;
    c *= (j - alpha) / (j + 1);
  }
  return out;
}

BranchingLaw make_stable_offspring(double nu, double c, double kappa, int J) {
  require_open_unit(nu, "nu");
  if (!(c > 0.0)) throw DomainError("offspring scale c must be positive");
  if (kappa < 0.0) throw DomainError("kappa must be nonnegative");
  if (J < 2) throw DomainError("offspring truncation order must be at least 2");

  const auto base = binomial_series(1.0 + nu, J);
  const auto pert = binomial_series(1.0 + 2.0 * nu, J);
  std::vector<double> a(static_cast<size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) {
    a[j] = c * (base[j] + kappa * pert[j]);
    if (j != 1 && a[j] < 0.0) {
      throw DomainError("negative offspring intensity a_" + std::to_string(j) +
                        "; kappa is too large for the (1-s)^{1+2nu} perturbation");
    }
  }

  // Mass and first moment carried by the discarded tail j > J.
  long double mass = 0.0L, moment = 0.0L;
  for (int j = 0; j <= J; ++j) {
    mass += a[j];
    moment += static_cast<long double>(j) * a[j];
  }
  const long double tail_mass = -mass;
  const long double tail_moment = -moment;
  const long double at_j = (tail_moment - tail_mass) / (J - 1);
  const long double at_one = tail_mass - at_j;
  a[J] = static_cast<double>(a[J] + at_j);
  a[1] = static_cast<double>(a[1] + at_one);
  if (a[J] < 0.0 || a[1] >= 0.0) throw DomainError("truncation order too small to rebalance the offspring law");

  const double bound = static_cast<double>(std::fabs(tail_mass) + std::fabs(at_j) + std::fabs(at_one)) + 1e-15;
  auto sv = kappa == 0.0 ? SlowlyVaryingSpec::constant(c) : SlowlyVaryingSpec::perturbed(c, kappa, nu);
  return BranchingLaw(std::move(a), nu, std::move(sv), StableForm{nu, c, kappa}, bound);
}

ImmigrationLaw make_stable_immigration(double delta, double d, double kappa, int J) {
  require_open_unit(delta, "delta");
  if (!(d > 0.0)) throw DomainError("immigration scale d must be positive");
  if (kappa < 0.0) throw DomainError("kappa must be nonnegative");
  if (J < 1) throw DomainError("immigration truncation order must be at least 1");

  const auto base = binomial_series(delta, J);
  const auto pert = binomial_series(2.0 * delta, J);
  std::vector<double> b(static_cast<size_t>(J) + 1);
  for (int j = 0; j <= J; ++j) {
    b[j] = -d * (base[j] + kappa * pert[j]);
    if (j >= 1 && b[j] < 0.0) {
      throw DomainError("negative immigration intensity b_" + std::to_string(j) +
                        "; kappa is too large for the (1-s)^{2 delta} perturbation");
    }
  }
  long double mass = 0.0L;
  for (double x : b) mass += x;
  b[J] = static_cast<double>(b[J] - mass);

  const double bound = 2.0 * static_cast<double>(std::fabs(mass)) + 1e-15;
  auto sv = kappa == 0.0 ? SlowlyVaryingSpec::constant(d) : SlowlyVaryingSpec::perturbed(d, kappa, delta);
  return ImmigrationLaw(std::move(b), delta, std::move(sv), StableForm{delta, d, kappa}, bound);
}

namespace {

template <LawKind Kind>
SlowlyVaryingSpec series_sv(std::shared_ptr<const std::vector<double>> coeffs, double index) {
  SlowlyVaryingSpec spec;
  spec.name = "series";
  spec.value = [coeffs, index](double x) {
    const double s = 1.0 - 1.0 / x;
    double acc = 0.0;
    for (auto it = coeffs->rbegin(); it != coeffs->rend(); ++it) acc = acc * s + *it;
    if constexpr (Kind == LawKind::kOffspring) {
      return acc * std::pow(x, 1.0 + index);
    } else {
      return -acc * std::pow(x, index);
    }
  };
  spec.remainder = [index](double x) { return std::pow(x, -index); };
  return spec;
}

}  // namespace

BranchingLaw offspring_from_coefficients(std::vector<double> a, double nu) {
  auto shared = std::make_shared<const std::vector<double>>(a);
  return BranchingLaw(std::move(a), nu, series_sv<LawKind::kOffspring>(shared, nu), std::nullopt, 0.0);
}

ImmigrationLaw immigration_from_coefficients(std::vector<double> b, double delta) {
  auto shared = std::make_shared<const std::vector<double>>(b);
  return ImmigrationLaw(std::move(b), delta, series_sv<LawKind::kImmigration>(shared, delta), std::nullopt, 0.0);
}

bool ValidationReport::ok() const {
  return std::all_of(checks.begin(), checks.end(), [](const ValidationCheck& c) { return c.passed; });
}

const ValidationCheck* ValidationReport::find(const std::string& name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os.precision(6);
  for (const auto& c : checks) {
    os << c.name << ' ' << (c.passed ? "PASS" : "FAIL") << " residual=" << c.residual << " tol=" << c.tolerance
       << '\n';
  }
  return os.str();
}

ValidationReport validate_law(const BranchingLaw& law, const LawTolerances& tol) {
  const auto a = law.coefficients();
  ValidationReport report;
  report.checks.push_back({"a0_positive", a[0] > 0.0, a[0], 0.0});
  report.checks.push_back({"a1_negative", a[1] < 0.0, a[1], 0.0});
  double worst = 0.0;
  for (size_t j = 0; j < a.size(); ++j) {
    if (j != 1) worst = std::min(worst, a[j]);
  }
  report.checks.push_back({"sign_pattern", worst >= 0.0, worst, 0.0});
  long double mass = 0.0L, moment = 0.0L;
  for (size_t j = 0; j < a.size(); ++j) {
    mass += a[j];
    moment += static_cast<long double>(j) * a[j];
  }
  const double m = static_cast<double>(std::fabs(mass));
  const double c = static_cast<double>(std::fabs(moment));
  report.checks.push_back({"mass_balance", m <= tol.mass, m, tol.mass});
  report.checks.push_back({"criticality", c <= tol.criticality, c, tol.criticality});
  return report;
}

ValidationReport validate_law(const ImmigrationLaw& law, const LawTolerances& tol) {
  const auto b = law.coefficients();
  ValidationReport report;
  report.checks.push_back({"b0_negative", b[0] < 0.0, b[0], 0.0});
  double worst = 0.0;
  for (size_t j = 1; j < b.size(); ++j) worst = std::min(worst, b[j]);
  report.checks.push_back({"sign_pattern", worst >= 0.0, worst, 0.0});
  long double mass = 0.0L;
  for (double x : b) mass += x;
  const double m = static_cast<double>(std::fabs(mass));
  report.checks.push_back({"mass_balance", m <= tol.mass, m, tol.mass});
  return report;
}

std::vector<double> parse_coefficient_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto first = item.find_first_not_of(" \t\r\n");
    if (first == std::string::npos) throw ConfigError("empty entry in coefficient list");
    try {
      size_t used = 0;
      out.push_back(std::stod(item.substr(first), &used));
      if (item.find_first_not_of(" \t\r\n", first + used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("bad coefficient '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("empty coefficient list");
  return out;
}

namespace {

template <LawKind Kind>
std::string law_text(const IntensityLaw<Kind>& law) {
  const bool offspring = Kind == LawKind::kOffspring;
  std::ostringstream os;
  if (law.closed_form()) {
    const auto& sf = *law.closed_form();
    os << "family=stable\n"
       << (offspring ? "nu=" : "delta=") << format_number(sf.index) << '\n'
       << (offspring ? "c=" : "d=") << format_number(sf.scale) << '\n'
       << "kappa=" << format_number(sf.kappa) << '\n'
       << "J=" << law.truncation_order() << '\n';
  } else {
    os << "family=coefficients\n"
       << (offspring ? "nu=" : "delta=") << format_number(law.index()) << '\n'
       << "coefficients=" << join(law.coefficients()) << '\n';
  }
  return os.str();
}

template <LawKind Kind>
IntensityLaw<Kind> law_from_text(const std::string& text) {
  const bool offspring = Kind == LawKind::kOffspring;
  const KeyValueBlock kv = KeyValueBlock::parse(text);
  const std::string family = kv.get_string("family", "stable");
  const double index = kv.require_double(offspring ? "nu" : "delta");
  if (family == "stable" || family == "perturbed") {
    const double scale = kv.require_double(offspring ? "c" : "d");
    const double kappa = kv.get_double("kappa", 0.0);
    const int J = kv.get_int("J", kDefaultTruncation);
    if constexpr (Kind == LawKind::kOffspring) {
      return make_stable_offspring(index, scale, kappa, J);
    } else {
      return make_stable_immigration(index, scale, kappa, J);
    }
  }
  if (family == "coefficients") {
    auto coeffs = parse_coefficient_list(kv.require_string("coefficients"));
    if constexpr (Kind == LawKind::kOffspring) {
      return offspring_from_coefficients(std::move(coeffs), index);
    } else {
      return immigration_from_coefficients(std::move(coeffs), index);
    }
  }
  throw ConfigError("unknown law family '" + family + "'");
}

}  // namespace

std::string to_text(const BranchingLaw& law) { return law_text(law); }
std::string to_text(const ImmigrationLaw& law) { return law_text(law); }
BranchingLaw offspring_from_text(const std::string& text) { return law_from_text<LawKind::kOffspring>(text); }
ImmigrationLaw immigration_from_text(const std::string& text) { return law_from_text<LawKind::kImmigration>(text); }

ModelSpec::ModelSpec(BranchingLaw offspring, ImmigrationLaw immigration, EvalMode mode)
    : offspring_(std::move(offspring)), immigration_(std::move(immigration)), mode_(mode) {
  if (std::fabs(gamma()) < 1e-12) {
    throw PreconditionError("gamma = delta - nu = 0 (the Markov Q-process case) is not supported");
  }
}

std::optional<double> ModelSpec::c_ratio() const {
  if (!c_offspring() || !c_immigration()) return std::nullopt;
  return *c_immigration() / *c_offspring();
}

cplx ModelSpec::lambda(cplx y) const {
  if (offspring_.uses_closed_form(mode_)) {
    const auto& sf = *offspring_.closed_form();
    const cplx yi = cpow(y, sf.index);
    return sf.scale * yi * (1.0 + sf.kappa * yi);
  }
  return f_one_minus(y) / y;
}

cplx ModelSpec::log_integrand(cplx y) const {
  if (closed_form()) {
    const auto& fo = *offspring_.closed_form();
    const auto& im = *immigration_.closed_form();
    const cplx yn = cpow(y, fo.index);
    const cplx yd = cpow(y, im.index);
    return -(im.scale / fo.scale) * cpow(y, gamma()) * (1.0 + im.kappa * yd) / (1.0 + fo.kappa * yn);
  }
  return y * g_one_minus(y) / f_one_minus(y);
}

cplx ModelSpec::regularized_integrand(cplx y) const {
  const double abs_gamma = std::fabs(gamma());
  if (closed_form()) {
    const auto& fo = *offspring_.closed_form();
    const auto& im = *immigration_.closed_form();
    const double ratio = im.scale / fo.scale;
    const cplx yn = cpow(y, fo.index);
    const cplx yd = cpow(y, im.index);
    const cplx numer = (abs_gamma - ratio) + abs_gamma * fo.kappa * yn - ratio * im.kappa * yd;
    return cpow(y, gamma()) * numer / (1.0 + fo.kappa * yn);
  }
  return log_integrand(y) + abs_gamma * cpow(y, gamma());
}

void ModelSpec::require_transient_ready(double tol) const {
  if (!(gamma() < 0.0)) throw PreconditionError("requires gamma < 0 (got " + format_number(gamma()) + ")");
  if (!(mu() > 0.0)) throw PreconditionError("requires mu = 2 delta - nu > 0 (got " + format_number(mu()) + ")");
  const auto cl = c_ratio();
  if (!cl) throw PreconditionError("requires slowly varying factors with constant limits to form C_L");
  if (std::fabs(*cl - std::fabs(gamma())) > tol) {
    throw PreconditionError("requires C_L = |gamma| (C_L=" + format_number(*cl) +
                            ", |gamma|=" + format_number(std::fabs(gamma())) + ")");
  }
}

void ModelSpec::require_recurrent() const {
  if (!(gamma() > 0.0)) throw PreconditionError("requires gamma > 0 (got " + format_number(gamma()) + ")");
}

std::string ModelSpec::describe() const {
  std::ostringstream os;
  os.precision(10);
  os << "nu=" << nu() << " delta=" << delta() << " gamma=" << gamma() << " mu=" << mu()
     << " L=" << offspring_.sv().name << " ell=" << immigration_.sv().name;
  if (auto cl = c_ratio()) os << " C_L=" << *cl;
  os << " mode=" << (mode_ == EvalMode::kAuto ? "auto" : "series");
  return os.str();
}

}  // namespace mbpi
