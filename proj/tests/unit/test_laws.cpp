#include <doctest.h>

#include <cmath>
#include <random>

#include "fixtures.hpp"
#include "mbpi/errors.hpp"
#include "mbpi/laws.hpp"

using namespace mbpi;

namespace {

long double sum(std::span<const double> v, bool weighted) {
  long double acc = 0.0L;
  for (std::size_t j = 0; j < v.size(); ++j) acc += (weighted ? static_cast<long double>(j) : 1.0L) * v[j];
  return acc;
}

std::vector<double> copy(std::span<const double> v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("stable offspring coefficients") {
  const auto a = make_stable_offspring(0.5, 1.0);
  CHECK(a.coefficient(0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(a.coefficient(2) == doctest::Approx(0.375).epsilon(1e-15));
  // a_1 carries the re-balancing of the folded tail
  CHECK(std::fabs(a.coefficient(1) + 1.5) < 1e-4);
  CHECK(std::fabs(a.coefficient(1) + 1.5) <= a.tail_bound());
  CHECK(a.truncation_order() == 2000);
  CHECK(make_stable_offspring(0.5, 2.0).coefficient(0) == doctest::Approx(2.0));
}

TEST_CASE("re-balanced truncation keeps mass and criticality") {
  for (int J : {2, 3, 50, 2000}) {
    const auto a = make_stable_offspring(0.5, 1.0, 0.0, J);
    CHECK(std::fabs(static_cast<double>(sum(a.coefficients(), false))) < 1e-12);
    CHECK(std::fabs(static_cast<double>(sum(a.coefficients(), true))) < 1e-12);
    CHECK(validate_law(a).ok());
  }
  const auto b = make_stable_immigration(0.75, 0.25, 0.0, 10);
  CHECK(std::fabs(static_cast<double>(sum(b.coefficients(), false))) < 1e-15);
}

TEST_CASE("binomial coefficients of (1-s)^{1+nu} are positive from j = 2") {
  for (double nu : {0.1, 0.5, 0.9}) {
    const auto c = binomial_series(1.0 + nu, 400);
    for (int j = 2; j <= 400; ++j) CHECK(c[j] > 0.0);
  }
}

TEST_CASE("stable immigration coefficients") {
  const auto b = make_stable_immigration(0.75, 0.25);
  CHECK(b.coefficient(0) == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK(b.coefficient(1) == doctest::Approx(0.1875).epsilon(1e-15));
  CHECK(b.coefficient(2) == doctest::Approx(0.0234375).epsilon(1e-15));
  CHECK(make_stable_immigration(0.5, 1.0).coefficient(1) == doctest::Approx(0.5));
}

TEST_CASE("parameter checks") {
  CHECK_THROWS_AS(make_stable_offspring(1.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_stable_offspring(0.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_stable_offspring(0.5, -1.0), DomainError);
  CHECK_THROWS_AS(make_stable_offspring(0.5, 1.0, 0.0, 1), DomainError);
  CHECK_THROWS_AS(make_stable_immigration(1.5, 0.25), DomainError);
  // (1-s)^{2 delta} with 2 delta > 1 has a negative b_2
  CHECK_THROWS_AS(make_stable_immigration(0.75, 0.25, 1.0), DomainError);
}

TEST_CASE("validation report") {
  const auto canonical = make_stable_offspring(0.5, 1.0);
  const auto rep = validate_law(canonical);
  CHECK(rep.ok());
  CHECK(std::fabs(rep.find("mass_balance")->residual) <= 1e-6);

  auto a = copy(canonical.coefficients());
  a[2] = -0.1;
  const auto neg = validate_law(offspring_from_coefficients(a, 0.5));
  CHECK_FALSE(neg.ok());
  CHECK_FALSE(neg.find("sign_pattern")->passed);

  a = copy(canonical.coefficients());
  a[1] = -1.4;
  const auto sub = validate_law(offspring_from_coefficients(a, 0.5));
  CHECK_FALSE(sub.find("criticality")->passed);

  auto b = copy(make_stable_immigration(0.75, 0.25).coefficients());
  b[0] = 0.1;
  CHECK_FALSE(validate_law(immigration_from_coefficients(b, 0.75)).find("b0_negative")->passed);
}

TEST_CASE("evaluation") {
  const auto a = make_stable_offspring(0.5, 1.0);
  const auto b = make_stable_immigration(0.75, 0.25);
  CHECK(std::abs(eval_f(a, 1.0)) == doctest::Approx(0.0));
  CHECK(eval_f(a, 0.5).real() == doctest::Approx(std::pow(0.5, 1.5)).epsilon(1e-14));
  CHECK(eval_g(b, 0.0).real() == doctest::Approx(-0.25).epsilon(1e-14));
  CHECK_THROWS_AS(eval_f(a, cplx(1.1, 0.0)), DomainError);
}

TEST_CASE("series and closed form agree within the tail bound") {
  const auto a = make_stable_offspring(0.5, 1.0, 0.5);
  const auto b = make_stable_immigration(0.75, 0.25);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 100; ++k) {
    const double s = u(rng);
    CHECK(std::abs(a.eval(s, EvalMode::kSeries) - a.eval(s)) <= a.tail_bound() + 1e-14);
    CHECK(std::abs(b.eval(s, EvalMode::kSeries) - b.eval(s)) <= b.tail_bound() + 1e-14);
  }
  // also on the circle
  for (int k = 0; k < 16; ++k) {
    const cplx z = std::polar(0.9, 0.4 * k);
    CHECK(std::abs(a.eval(z, EvalMode::kSeries) - a.eval(z)) <= a.tail_bound() + 1e-14);
  }
}

TEST_CASE("f(s) = Lambda(1-s) (1-s)") {
  const auto m = fixtures::perturbed();
  for (double s : {0.0, 0.3, 0.9, 0.999}) {
    CHECK(m.f(s).real() == doctest::Approx(m.lambda(1.0 - s).real() * (1.0 - s)).epsilon(1e-12));
  }
}

TEST_CASE("text round trip") {
  const auto a = make_stable_offspring(0.5, 1.5, 0.25, 300);
  const auto back = offspring_from_text(to_text(a));
  CHECK(back.truncation_order() == 300);
  CHECK(back.coefficient(7) == a.coefficient(7));
  const auto b = immigration_from_text("family=coefficients\ndelta=0.5\ncoefficients=-1, 0.5, 0.5\n");
  CHECK(b.coefficient(2) == 0.5);
  CHECK(validate_law(b).ok());
  const auto again = immigration_from_text(to_text(b));
  CHECK(again.coefficient(0) == -1.0);
  CHECK_THROWS_AS(parse_coefficient_list("1, x, 2"), ConfigError);
  CHECK_THROWS_AS(offspring_from_text("family=stable\nc=1\n"), ConfigError);
  CHECK_THROWS_AS(offspring_from_text("family=weird\nnu=0.5\n"), ConfigError);
}

TEST_CASE("model indices and preconditions") {
  const auto m = fixtures::transient();
  CHECK(m.gamma() == doctest::Approx(-0.25));
  CHECK(m.mu() == doctest::Approx(0.25));
  CHECK(*m.c_ratio() == doctest::Approx(0.25));
  CHECK_NOTHROW(m.require_transient_ready());
  CHECK_THROWS_AS(m.require_recurrent(), PreconditionError);
  CHECK_THROWS_AS(fixtures::recurrent().require_transient_ready(), PreconditionError);
  const ModelSpec off(make_stable_offspring(0.75, 1.0), make_stable_immigration(0.5, 0.5));
  CHECK_THROWS_AS(off.require_transient_ready(), PreconditionError);
  CHECK_THROWS_AS(ModelSpec(make_stable_offspring(0.5, 1.0), make_stable_immigration(0.5, 0.25)), PreconditionError);
}

TEST_CASE("regularized integrand cancels for the transient canonical pair") {
  const auto m = fixtures::transient();
  for (double y : {1e-9, 1e-3, 0.5, 1.0}) CHECK(std::abs(m.regularized_integrand(y)) == 0.0);
}
