#include <doctest.h>

#include <cmath>
#include <numeric>

#include "fixtures.hpp"
#include "mbpi/errors.hpp"
#include "mbpi/kernel.hpp"
#include "mbpi/sim.hpp"

using namespace mbpi;

namespace {

double mean_se(const SimResult& r, const std::vector<int>& states) {
  double acc = 0.0;
  for (int j : states) acc += r.se[j];
  return acc / states.size();
}

}  // namespace

TEST_CASE("no time elapses at t = 0") {
  const EventSampler sampler(fixtures::recurrent());
  auto rng = replicate_stream(1, 0);
  CHECK(simulate_path(sampler, 0, 0.0, 100, rng).final_state == 0);
  const auto r = estimate_pmf(fixtures::recurrent(), SimConfig{3, 0.0, 50, 7});
  REQUIRE(r.pmf.size() == 4);
  CHECK(r.pmf[3] == 1.0);
  CHECK(r.se[3] == 0.0);
  CHECK(r.total_events == 0);
}

TEST_CASE("jump samplers") {
  const EventSampler sampler(fixtures::recurrent());
  CHECK(sampler.branching_rate() == doctest::Approx(1.5).epsilon(1e-4));
  CHECK(sampler.immigration_rate() == doctest::Approx(0.25));
  auto rng = replicate_stream(3, 4);
  long deaths = 0, ones = 0, empty = 0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const long j = sampler.offspring(rng);
    ones += j == 1;
    deaths += j == 0;
    empty += sampler.immigrants(rng) < 1;
  }
  CHECK(ones == 0);
  CHECK(empty == 0);
  // a_0 / (-a_1) = 2/3
  CHECK(std::fabs(deaths / double(n) - 1.0 / sampler.branching_rate()) < 5e-3);
}

TEST_CASE("identical seeds reproduce bit-exactly, independent of threads") {
  const SimConfig cfg{0, 5.0, 4000, 99};
  const auto a = estimate_pmf(fixtures::recurrent(), cfg, 1);
  const auto b = estimate_pmf(fixtures::recurrent(), cfg, 4);
  CHECK(a.counts == b.counts);
  CHECK(a.pmf == b.pmf);
  CHECK(a.total_events == b.total_events);
  auto other = cfg;
  other.seed = 100;
  CHECK(estimate_pmf(fixtures::recurrent(), other).counts != a.counts);
  CHECK(replicate_stream(5, 1)() != replicate_stream(5, 2)());
}

TEST_CASE("standard errors shrink like n^{-1/2}") {
  SimConfig cfg{0, 5.0, 20000, 11};
  const auto small = estimate_pmf(fixtures::recurrent(), cfg);
  cfg.replicates = 40000;
  cfg.seed = 12;
  const auto large = estimate_pmf(fixtures::recurrent(), cfg);
  const std::vector<int> states{0, 1, 2, 3};
  CHECK(mean_se(large, states) / mean_se(small, states) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("p_00 agrees with the kernel on the same truncated law") {
  const auto model = fixtures::recurrent().with_mode(EvalMode::kSeries);
  const auto r = estimate_pmf(model, SimConfig{0, 5.0, 20000, 2024});
  const double p00 = compute_P(model, 5.0, 0.0).P.real();
  CHECK(std::fabs(r.pmf[0] - p00) <= 3.0 * r.se[0]);
}

TEST_CASE("capped replicates are reported, not counted") {
  const auto r = estimate_pmf(fixtures::recurrent(), SimConfig{0, 20.0, 2000, 5, 3});
  CHECK(r.capped > 0);
  CHECK(r.capped_fraction == doctest::Approx(r.capped / 2000.0));
  const double mass = std::accumulate(r.pmf.begin(), r.pmf.end(), 0.0);
  CHECK(mass + r.capped_fraction == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(r.pmf.size() <= 3);
}

TEST_CASE("invalid inputs") {
  const auto model = fixtures::recurrent();
  const auto coeffs = model.offspring().coefficients();
  std::vector<double> a(coeffs.begin(), coeffs.end());
  a[2] = -0.1;
  const ModelSpec bad(offspring_from_coefficients(a, 0.5), make_stable_immigration(0.75, 0.25));
  CHECK_THROWS_AS(estimate_pmf(bad, SimConfig{}), PreconditionError);
  CHECK_THROWS_AS(estimate_pmf(fixtures::recurrent(), SimConfig{0, 1.0, 0}), DomainError);
  const EventSampler sampler(fixtures::recurrent());
  auto rng = replicate_stream(1, 0);
  CHECK_THROWS_AS(simulate_path(sampler, -1, 1.0, 10, rng), DomainError);
}

TEST_CASE("z-scores against a reference pmf") {
  SimResult sim;
  sim.pmf = {0.5, 0.3, 0.2};
  sim.se = {0.01, 0.01, 0.01};
  const auto ok = compare_with_kernel(sim, {0.51, 0.29, 0.2, 0.0}, 1e-2);
  CHECK(ok.passed);
  CHECK(ok.rows.size() == 4);
  CHECK(ok.max_abs_z == doctest::Approx(1.0));
  CHECK_FALSE(ok.rows[3].checked);
  const auto bad = compare_with_kernel(sim, {0.45, 0.35, 0.2}, 1e-2);
  CHECK_FALSE(bad.passed);
  CHECK(bad.max_abs_z == doctest::Approx(5.0));
}
