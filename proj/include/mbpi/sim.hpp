#pragma once

#include <boost/random/discrete_distribution.hpp>
#include <cstdint>
#include <random>
#include <vector>

#include "mbpi/kernel.hpp"
#include "mbpi/laws.hpp"

namespace mbpi {

struct SimConfig {
  int initial_state = 0;
  double t_max = 1.0;
  long replicates = 1000;
  std::uint64_t seed = 1;
  long state_cap = 1'000'000;
};

struct PathResult {
  long final_state = 0;
  bool capped = false;
  long events = 0;
};

// Jump-size samplers built once per law (alias tables).
class EventSampler {
 public:
  explicit EventSampler(const ModelSpec& model);
  double branching_rate() const { return branching_rate_; }    // -a_1
  double immigration_rate() const { return immigration_rate_; }  // -b_0
  // X -> X - 1 + j with probability a_j / (-a_1), j != 1
  long offspring(std::mt19937_64& rng) const;
  // X -> X + j with probability b_j / (-b_0), j >= 1
  long immigrants(std::mt19937_64& rng) const;

 private:
  double branching_rate_ = 0.0;
  double immigration_rate_ = 0.0;
  std::vector<long> offspring_sizes_;
  std::vector<double> offspring_weights_;
  std::vector<double> immigrant_weights_;
  using Alias = boost::random::discrete_distribution<std::size_t, double>;
  Alias offspring_dist_;
  Alias immigrant_dist_;
};

// Generator for replicate `index`: an independent stream seeded from (seed, index).
std::mt19937_64 replicate_stream(std::uint64_t seed, std::uint64_t index);

// One trajectory of the chain from initial_state up to t_max.
PathResult simulate_path(const EventSampler& sampler, int initial_state, double t_max, long state_cap,
                         std::mt19937_64& rng);

struct SimResult {
  std::vector<double> pmf;  // p_hat_j = count_j / replicates
  std::vector<double> se;   // sqrt(p_hat (1 - p_hat) / replicates)
  std::vector<long> counts;
  long replicates = 0;
  long capped = 0;
  double capped_fraction = 0.0;
  long rng_streams_used = 0;
  long total_events = 0;
  std::uint64_t seed = 0;
};

// Throws PreconditionError for a law that fails validation.
SimResult estimate_pmf(const ModelSpec& model, const SimConfig& config, int threads = 1);

struct ComparisonRow {
  int j = 0;
  double p_hat = 0.0;
  double p_kernel = 0.0;
  double se = 0.0;
  double z = 0.0;
  bool checked = false;  // p_kernel >= p_min
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  double max_abs_z = 0.0;
  double z_limit = 3.0;
  double p_min = 0.0;
  bool passed = false;
};

// z_j = (p_hat_j - p_j) / se_j over states with kernel p_j >= p_min.
Comparison compare_with_kernel(const SimResult& sim, const std::vector<double>& kernel_pmf, double p_min,
                               double z_limit = 3.0);

}  // namespace mbpi
