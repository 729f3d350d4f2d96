#include "mbpi/sim.hpp"

#include <algorithm>
#include <cmath>

#include "mbpi/errors.hpp"
#include "mbpi/parallel.hpp"

namespace mbpi {

EventSampler::EventSampler(const ModelSpec& model) {
  const auto a = model.offspring().coefficients();
  const auto b = model.immigration().coefficients();
  if (a.size() < 2 || b.empty()) throw PreconditionError("simulation needs a finite truncated law");
  branching_rate_ = -a[1];
  immigration_rate_ = -b[0];
  for (std::size_t j = 0; j < a.size(); ++j) {
    if (j == 1 || a[j] <= 0.0) continue;
    offspring_sizes_.push_back(static_cast<long>(j));
    offspring_weights_.push_back(a[j]);
  }
  immigrant_weights_.assign(b.begin() + 1, b.end());
  for (double& w : immigrant_weights_) w = std::max(w, 0.0);
  if (!(branching_rate_ > 0.0) || offspring_weights_.empty()) throw PreconditionError("offspring law has no jumps");
  if (immigration_rate_ > 0.0 && immigrant_weights_.empty()) throw PreconditionError("immigration law has no jumps");
  // Walker alias tables
  offspring_dist_ = Alias(offspring_weights_.begin(), offspring_weights_.end());
  if (!immigrant_weights_.empty()) immigrant_dist_ = Alias(immigrant_weights_.begin(), immigrant_weights_.end());
}

long EventSampler::offspring(std::mt19937_64& rng) const { return offspring_sizes_[offspring_dist_(rng)]; }

long EventSampler::immigrants(std::mt19937_64& rng) const { return static_cast<long>(immigrant_dist_(rng)) + 1; }

std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

PathResult simulate_path(const EventSampler& sampler, int initial_state, double t_max, long state_cap,
                         std::mt19937_64& rng) {
  if (initial_state < 0) throw DomainError("initial state must be >= 0");
  if (t_max < 0.0) throw DomainError("t_max must be >= 0");
  if (state_cap < initial_state + 1) throw DomainError("state cap must exceed the initial state");
  PathResult out;
  long x = initial_state;
  double time = 0.0;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  while (true) {
    const double branch = static_cast<double>(x) * sampler.branching_rate();
    const double rate = branch + sampler.immigration_rate();
    if (!(rate > 0.0)) break;
    time += std::exponential_distribution<double>(rate)(rng);
    if (time >= t_max) break;
    if (unif(rng) * rate < branch) {
      x += sampler.offspring(rng) - 1;
    } else {
      x += sampler.immigrants(rng);
    }
    ++out.events;
    if (x >= state_cap) {
      out.capped = true;
      break;
    }
  }
  out.final_state = x;
  return out;
}

SimResult estimate_pmf(const ModelSpec& model, const SimConfig& config, int threads) {
  if (config.replicates < 1) throw DomainError("replicates must be >= 1");
  const auto ro = validate_law(model.offspring());
  const auto ri = validate_law(model.immigration());
  if (!ro.ok() || !ri.ok()) throw PreconditionError("law failed validation:\n" + ro.to_string() + ri.to_string());
  const EventSampler sampler(model);

  std::vector<PathResult> paths(config.replicates);
  parallel_for(paths.size(), threads, [&](std::size_t k) {
    auto rng = replicate_stream(config.seed, k);
    paths[k] = simulate_path(sampler, config.initial_state, config.t_max, config.state_cap, rng);
  });

  SimResult out;
  out.replicates = config.replicates;
  out.rng_streams_used = config.replicates;
  out.seed = config.seed;
  long top = 0;
  for (const auto& p : paths) {
    out.total_events += p.events;
    if (p.capped) {
      ++out.capped;
    } else {
      top = std::max(top, p.final_state);
    }
  }
  out.counts.assign(top + 1, 0);
  for (const auto& p : paths) {
    if (!p.capped) ++out.counts[p.final_state];
  }
  const double n = static_cast<double>(config.replicates);
  for (long c : out.counts) {
    const double p = c / n;
    out.pmf.push_back(p);
    out.se.push_back(std::sqrt(p * (1.0 - p) / n));
  }
  out.capped_fraction = out.capped / n;
  return out;
}

Comparison compare_with_kernel(const SimResult& sim, const std::vector<double>& kernel_pmf, double p_min,
                               double z_limit) {
  Comparison out;
  out.p_min = p_min;
  out.z_limit = z_limit;
  const std::size_t n = std::max(sim.pmf.size(), kernel_pmf.size());
  for (std::size_t j = 0; j < n; ++j) {
    ComparisonRow row;
    row.j = static_cast<int>(j);
    row.p_hat = j < sim.pmf.size() ? sim.pmf[j] : 0.0;
    row.se = j < sim.se.size() ? sim.se[j] : 0.0;
    row.p_kernel = j < kernel_pmf.size() ? kernel_pmf[j] : 0.0;
    const double diff = row.p_hat - row.p_kernel;
    row.z = row.se > 0.0 ? diff / row.se : (diff == 0.0 ? 0.0 : INFINITY);
    row.checked = j < kernel_pmf.size() && row.p_kernel >= p_min;
    if (row.checked) out.max_abs_z = std::max(out.max_abs_z, std::fabs(row.z));
    out.rows.push_back(row);
  }
  out.passed = out.max_abs_z <= z_limit;
  return out;
}

}  // namespace mbpi
