#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mbpi/slowly_varying.hpp"

namespace mbpi {

using cplx = std::complex<double>;

inline constexpr int kDefaultTruncation = 2000;

enum class LawKind { kOffspring, kImmigration };

// Which representation of f / g an evaluation uses. kAuto picks the closed
// form when the law has one.
enum class EvalMode { kAuto, kSeries };

// Closed-form stable-domain family, written in y = 1 - s:
//   offspring    f(1-y) =  scale * y^{1+index} * (1 + kappa y^index)
//   immigration  g(1-y) = -scale * y^{index}   * (1 + kappa y^index)
struct StableForm {
  double index = 0.0;
  double scale = 0.0;
  double kappa = 0.0;
};

// Truncated intensity law a_0..a_J (offspring) or b_0..b_J (immigration).
// Immutable after construction.
template <LawKind Kind>
class IntensityLaw {
 public:
  IntensityLaw(std::vector<double> coefficients, double index, SlowlyVaryingSpec sv,
               std::optional<StableForm> form, double tail_bound);

  std::span<const double> coefficients() const { return coefficients_; }
  double coefficient(int j) const { return coefficients_.at(j); }
  int truncation_order() const { return static_cast<int>(coefficients_.size()) - 1; }
  // nu for offspring laws, delta for immigration laws.
  double index() const { return index_; }
  const SlowlyVaryingSpec& sv() const { return sv_; }
  const std::optional<StableForm>& closed_form() const { return form_; }
  // sup over |z| <= 1 of |series(z) - closed(z)|; zero without a closed form.
  double tail_bound() const { return tail_bound_; }

  // f(z) or g(z), |z| <= 1.
  cplx eval(cplx z, EvalMode mode = EvalMode::kAuto) const;
  double eval(double s, EvalMode mode = EvalMode::kAuto) const;
  // f(1-y) or g(1-y). The closed form is evaluated directly in y, so nothing
  // is lost to the cancellation in 1 - (1 - y). No domain check.
  cplx eval_one_minus(cplx y, EvalMode mode = EvalMode::kAuto) const;

  bool uses_closed_form(EvalMode mode) const { return mode == EvalMode::kAuto && form_.has_value(); }

 private:
  cplx series(cplx z) const;

  std::vector<double> coefficients_;
  double index_;
  SlowlyVaryingSpec sv_;
  std::optional<StableForm> form_;
  double tail_bound_;
};

using BranchingLaw = IntensityLaw<LawKind::kOffspring>;
using ImmigrationLaw = IntensityLaw<LawKind::kImmigration>;

// Coefficients of (1 - s)^alpha up to s^J.
std::vector<double> binomial_series(double alpha, int J);

// c (1-s)^{1+nu} + c kappa (1-s)^{1+2nu}, truncated at J. The mass beyond J is
// folded into a_J and a_1 so that sum a_j = 0 and sum j a_j = 0 hold exactly.
BranchingLaw make_stable_offspring(double nu, double c, double kappa = 0.0, int J = kDefaultTruncation);
// -d (1-s)^delta - d kappa (1-s)^{2 delta}, truncated at J with the residual
// mass folded into b_J.
ImmigrationLaw make_stable_immigration(double delta, double d, double kappa = 0.0,
                                       int J = kDefaultTruncation);

// User supplied intensities; validated by the caller through validate_law.
BranchingLaw offspring_from_coefficients(std::vector<double> a, double nu);
ImmigrationLaw immigration_from_coefficients(std::vector<double> b, double delta);

struct LawTolerances {
  double mass = 1e-9;
  double criticality = 1e-9;
};

struct ValidationCheck {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;

  bool ok() const;
  const ValidationCheck* find(const std::string& name) const;
  std::string to_string() const;
};

ValidationReport validate_law(const BranchingLaw& law, const LawTolerances& tol = {});
ValidationReport validate_law(const ImmigrationLaw& law, const LawTolerances& tol = {});

inline cplx eval_f(const BranchingLaw& law, cplx z, EvalMode mode = EvalMode::kAuto) {
  return law.eval(z, mode);
}
inline cplx eval_g(const ImmigrationLaw& law, cplx z, EvalMode mode = EvalMode::kAuto) {
  return law.eval(z, mode);
}

// Plain key=value blocks, e.g.
//   family=stable  nu=0.5  c=1  kappa=0  J=2000
//   family=coefficients  nu=0.5  coefficients=0.5,-1,0.5
std::string to_text(const BranchingLaw& law);
std::string to_text(const ImmigrationLaw& law);
BranchingLaw offspring_from_text(const std::string& text);
ImmigrationLaw immigration_from_text(const std::string& text);

// "1, -1.5, 0.5" -> {1, -1.5, 0.5}. Throws ConfigError on junk.
std::vector<double> parse_coefficient_list(const std::string& text);

// The pair of laws together with the derived indices.
class ModelSpec {
 public:
  ModelSpec(BranchingLaw offspring, ImmigrationLaw immigration, EvalMode mode = EvalMode::kAuto);

  const BranchingLaw& offspring() const { return offspring_; }
  const ImmigrationLaw& immigration() const { return immigration_; }
  EvalMode mode() const { return mode_; }
  ModelSpec with_mode(EvalMode mode) const { return ModelSpec(offspring_, immigration_, mode); }

  double nu() const { return offspring_.index(); }
  double delta() const { return immigration_.index(); }
  double gamma() const { return delta() - nu(); }
  double mu() const { return 2.0 * delta() - nu(); }
  std::optional<double> c_offspring() const { return offspring_.sv().limit; }
  std::optional<double> c_immigration() const { return immigration_.sv().limit; }
  // C_L = C_ell / C_calL when both limits exist.
  std::optional<double> c_ratio() const;

  bool closed_form() const { return offspring_.uses_closed_form(mode_) && immigration_.uses_closed_form(mode_); }

  cplx f(cplx z) const { return offspring_.eval(z, mode_); }
  cplx g(cplx z) const { return immigration_.eval(z, mode_); }
  cplx f_one_minus(cplx y) const { return offspring_.eval_one_minus(y, mode_); }
  cplx g_one_minus(cplx y) const { return immigration_.eval_one_minus(y, mode_); }
  // Lambda(y) = f(1-y)/y.
  cplx lambda(cplx y) const;
  // y g(1-y)/f(1-y): the integrand of ln P after the substitution u = 1 - e^{-v}.
  cplx log_integrand(cplx y) const;
  // y g(1-y)/f(1-y) + |gamma| y^{gamma} = y^{gamma} (|gamma| - Lratio(1/y)),
  // the integrand of ln B after u = 1 - e^{-v}. For closed forms the constant
  // parts cancel algebraically before anything is evaluated.
  cplx regularized_integrand(cplx y) const;

  // Throws PreconditionError unless gamma < 0, mu > 0 and |C_L - |gamma|| <= tol.
  void require_transient_ready(double tol = 1e-9) const;
  // Throws PreconditionError unless gamma > 0.
  void require_recurrent() const;

  std::string describe() const;

 private:
  BranchingLaw offspring_;
  ImmigrationLaw immigration_;
  EvalMode mode_;
};

}  // namespace mbpi
