// One verdict line per acceptance criterion, plus indented supplementary lines.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <string>
#include <vector>

#include "mbpi/asymptotics.hpp"
#include "mbpi/invariants.hpp"
#include "mbpi/kernel.hpp"
#include "mbpi/laws.hpp"
#include "mbpi/sim.hpp"

using namespace mbpi;

namespace {

// series oracle (tests/oracles/series_oracle.py)
constexpr double kUSum512 = 0.84044357499328697;
constexpr double kU511 = 7.2404308932718716e-5;

ModelSpec recurrent() {
  return ModelSpec(make_stable_offspring(0.5, 1.0), make_stable_immigration(0.75, 0.25));
}
ModelSpec transient() {
  return ModelSpec(make_stable_offspring(0.75, 1.0), make_stable_immigration(0.5, 0.25));
}
ModelSpec perturbed() {
  return ModelSpec(make_stable_offspring(0.5, 1.0, 1.0), make_stable_immigration(0.75, 0.25));
}

const char* pf(bool ok) { return ok ? "PASS" : "FAIL"; }

void note(const char* fmt, auto... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
}

struct Criterion {
  int id;
  const char* title;
  double budget_s;
  std::function<bool()> body;
};

bool criterion1() {
  const auto m = recurrent();
  double worst = 0.0;
  for (double t : {0.1, 1.0, 10.0, 1e2, 1e3, 1e4}) {
    for (double s : {0.0, 0.3, 0.7, 0.95}) {
      const double exact = std::pow(std::pow(1.0 - s, -0.5) + 0.5 * t, -2.0);
      worst = std::max(worst, std::fabs(solve_F(m, t, s).R.real() / exact - 1.0));
    }
  }
  note("max relative error of R %.3e (tol 1e-8)", worst);
  return worst <= 1e-8;
}

bool criterion2() {
  const auto m = recurrent();
  const auto u = extract_measure(m, MeasureKind::kDistributionU, InversionSettings{512, 0.9, 1 << 14, 1e-8, false});
  double min_u = 0.0;
  int argmin = 0;
  for (int j = 0; j < 512; ++j) {
    if (u.coefficients[j] < min_u) {
      min_u = u.coefficients[j];
      argmin = j;
    }
  }
  const double sum_err = std::fabs(u.sum() - 1.0);
  const double u0_err = std::fabs(u.coefficients[0] - std::exp(-1.0));
  note("r=0.9 M=2^14: min u_j %.3e at j=%d, |sum-1| %.3e, |u_0-1/e| %.3e", min_u, argmin, sum_err, u0_err);
  note("roundoff amplification into u_511: %.3e", u.roundoff_bound);
  const auto fine = extract_measure(m, MeasureKind::kDistributionU, InversionSettings{512, 0.995, 1 << 15, 1e-8, false});
  double fine_min = 1.0;
  for (double v : fine.coefficients) fine_min = std::min(fine_min, v);
  note("r=0.995 M=2^15: min u_j %.3e, |u_511-oracle| %.2e, sum_{j<512} %.12f (oracle %.12f), tail 1-sum %.4f",
       fine_min, std::fabs(fine.coefficients[511] - kU511), fine.sum(), kUSum512, 1.0 - kUSum512);
  return min_u >= -1e-9 && sum_err <= 1e-8 && u0_err <= 1e-8;
}

bool criterion3() {
  const auto m = recurrent();
  const auto u = extract_measure(m, MeasureKind::kDistributionU, InversionSettings{2048, 0.995, 1 << 15, 1e-8, false});
  const auto rep = check_invariance(u, m, 1.0, 1024, 128);
  note("max residual %.3e at j=%d, rows i<=%d, tail bound %.3e, measure bound %.3e", rep.max_residual, rep.argmax,
       rep.i_max, rep.tail_bound, rep.measure_bound);
  return rep.max_residual + rep.tail_bound <= 1e-6;
}

bool criterion4() {
  const auto fit = rate_theorem1(recurrent(), 0.0, log_grid(1e2, 1e6, 4), FitOptions{.r2_min = 0.999});
  const double comp = fit.compensated_last();
  const double target = std::sqrt(2.0);
  const bool comp_ok = std::fabs(comp / target - 1.0) <= 1e-2;
  note("%s, r2 %.6f", fit.summary().c_str(), fit.r_squared);
  note("e(t) t^{1/2} at t=1e6: %.6f, derived limit sqrt(2) = %.6f %s", comp, target, pf(comp_ok));
  return fit.passed && comp_ok;
}

bool criterion5() {
  const auto m = transient();
  const double lim = std::exp(log_compensated_P(m, 1e6, 0.0));
  const bool lim_ok = std::fabs(lim - std::exp(1.0)) <= 1e-3;
  const auto fit = rate_theorem2(m, 0.0, log_grid(1e2, 1e6, 4));
  const auto uni = theorem2_uniformity(m, {0.0, 0.25, 0.5, 0.75}, log_grid(1e2, 1e6, 4));
  note("e^T P(1e6;0) = %.8f, |. - e| %.3e %s", lim, std::fabs(lim - std::exp(1.0)), pf(lim_ok));
  note("%s, r2 %.6f", fit.summary().c_str(), fit.r_squared);
  note("uniformity max ratio %.4f (bound 10) %s", uni.max_ratio, pf(uni.passed));
  return lim_ok && fit.passed && uni.passed;
}

bool criterion6() {
  const auto c = rate_corollary1(transient(), log_grid(1e2, 1e6, 4), FitOptions{.slope_tol = 0.15});
  const bool b_ok = std::fabs(c.B0 - 1.0) <= 1e-8;
  note("%s, r2 %.6f", c.fit.summary().c_str(), c.fit.r_squared);
  note("B(0) = %.15f %s", c.B0, pf(b_ok));
  return c.fit.passed && b_ok;
}

bool criterion7() {
  const auto l2 = check_lemma2(perturbed(), 0.0, log_grid(10.0, 1e6, 2));
  const auto l3 = check_lemma3(SlowlyVaryingSpec::perturbed(1.0, 1.0, 0.5), 0.25, log_grid(10.0, 1e6, 2), 2.0);
  const std::vector<double> xs{0.0, 0.5, 0.9, 0.99, 0.999, 0.9999, 1 - 1e-5, 1 - 1e-6};
  const auto l4c = check_lemma4(recurrent(), xs);
  double exact = 0.0;
  for (const auto& row : l4c.rows) exact = std::max(exact, std::fabs(row[3] - 1.0));
  const bool l4c_ok = exact <= 1e-12;
  const auto l4p = check_lemma4(perturbed(), xs);
  note("lemma2 sup remainder/ln nu %.4f (bound %.0f) %s", l2.statistic, l2.bound, pf(l2.passed));
  note("lemma3 sup |ratio-1|/rho %.4f (bound %.0f) %s", l3.statistic, l3.bound, pf(l3.passed));
  note("lemma4 canonical max |ratio-1| %.3e %s", exact, pf(l4c_ok));
  note("lemma4 perturbed sup |ratio-1|/Lambda %.4f (bound %.0f) %s", l4p.statistic, l4p.bound, pf(l4p.passed));
  return l2.passed && l3.passed && l4c_ok && l4p.passed;
}

bool criterion8() {
  const auto m = recurrent().with_mode(EvalMode::kSeries);
  const SimConfig cfg{0, 5.0, 100000, 20240517};
  const auto a = estimate_pmf(m, cfg, 1);
  const auto b = estimate_pmf(m, cfg, 2);
  const bool same = a.counts == b.counts && a.total_events == b.total_events;
  KernelOptions opts;
  opts.route = PRoute::kTimeIntegral;
  const auto k = transition_probs(m, 0, 5.0, InversionSettings{256, 0.9, 1024}, opts);
  const auto cmp = compare_with_kernel(a, k.values, 1e-3);
  int checked = 0;
  for (const auto& row : cmp.rows) checked += row.checked;
  note("max |z| %.3f over %d states with p_0j(5) >= 1e-3, capped fraction %.1e", cmp.max_abs_z, checked,
       a.capped_fraction);
  note("rerun with the same seed on 2 threads: %s", same ? "bit-identical" : "DIFFERENT");
  return cmp.passed && same;
}

bool criterion9() {
  const auto up = ratio_limits(recurrent(), 1, {1e2, 1e3, 1e4});
  const auto down = ratio_limits(transient(), 1, {1e1, 1e2, 1e3});
  const double e_up = std::fabs(up.ratios.back()[1] - up.limits[1]);
  const double e_down = std::fabs(down.ratios.back()[1] - down.limits[1]);
  note("gamma>0: v_1(1e4) = %.8f, u_1/u_0 = %.8f, diff %.2e (tol 1e-3)", up.ratios.back()[1], up.limits[1], e_up);
  note("gamma<0: v_1(1e3) = %.8f, pi_1/pi_0 = %.8f, diff %.2e (tol 1e-2)", down.ratios.back()[1], down.limits[1],
       e_down);
  return e_up <= 1e-3 && e_down <= 1e-2;
}

}  // namespace

int main() {
  const std::vector<Criterion> all{
      {1, "closed-form kernel oracle", 5, criterion1},
      {2, "invariant distribution normalization", 30, criterion2},
      {3, "invariance of U", 120, criterion3},
      {4, "recurrent rate", 60, criterion4},
      {5, "transient limit and rate", 60, criterion5},
      {6, "corollary rate", 60, criterion6},
      {7, "lemma verifiers", 120, criterion7},
      {8, "simulation cross-check", 300, criterion8},
      {9, "ratio limits", 120, criterion9},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    std::string error;
    try {
      ok = c.body();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs <= c.budget_s;
    const bool passed = ok && in_time;
    failed += !passed;
    std::printf("criterion %d %s: %s (%.1f s, budget %.0f s)%s%s\n", c.id, c.title, pf(passed), secs, c.budget_s,
                error.empty() ? "" : " error: ", error.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
