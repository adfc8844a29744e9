#pragma once

// Monte Carlo and grid-size sweep harnesses.

#include "impulse/planner.hpp"
#include "impulse/scenario.hpp"

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace impulse {

/// Pseudostate target [m]: a*delta-lambda uniform in +-10 km, the other components in +-5 km.
Vector6 random_target(std::mt19937_64& rng);

/// Stream seed of case `index` under base seed `seed`.
std::uint64_t case_seed(std::uint64_t seed, std::uint64_t index);

struct McCase {
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  int iterations = 0;
  double cost = 0.0;   // [m/s]
  double bound = 0.0;  // [m/s]
  double gap = 0.0;
  double residual = 0.0;
};

struct McResult {
  InitScheme scheme = InitScheme::Seeded;
  std::vector<McCase> cases;
  std::array<int, 15> histogram{};  // iterations 1..14, then 15 and above

  double mean_iterations() const;
  int max_iterations() const;
  int failures() const;
  double fraction_within(int iterations) const;
  double max_residual() const;
};

/// Case-level parallelism; the result does not depend on the thread count.
McResult monte_carlo(const SampledProblem& problem, const PlannerConfig& config, InitScheme scheme, int count,
                     std::uint64_t seed, int threads = 0);

/// IMPULSE_THREADS if set and positive, otherwise the hardware concurrency.
int default_threads();

/// seed, ok, iterations, cost_mms, bound_mms, gap, residual
std::string montecarlo_csv(const McResult& result);
/// iterations, count; the last bin reads "15+"
std::string histogram_csv(const McResult& result);

struct SweepRow {
  Index grid_size = 0;
  double seconds = 0.0;  // planner mean wall clock, Gamma tabulation excluded
  double min_seconds = 0.0;
  double sample_seconds = 0.0;
  double cost = 0.0;  // [m/s]
  int iterations = 0;
};

std::vector<SweepRow> sweep(const Scenario& scenario, const std::vector<Index>& grid_sizes, int repetitions,
                            InitScheme scheme = InitScheme::Seeded);

/// grid_size, seconds, min_seconds, sample_seconds, cost_mms, iterations
std::string sweep_csv(const std::vector<SweepRow>& rows);

InitScheme parse_init_scheme(const std::string& name);  // two | six | ten
const char* init_scheme_name(InitScheme scheme);

}  // namespace impulse
