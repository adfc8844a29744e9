#pragma once

// Random small instances on the mDOT orbit with polyhedral modes only.

#include "impulse/astro.hpp"
#include "impulse/dual.hpp"
#include "impulse/experiments.hpp"

#include <algorithm>
#include <random>
#include <set>

namespace impulse::testing {

struct SmallInstance {
  SampledProblem problem;
  VectorXd w;
};

inline SmallInstance polyhedral_instance(std::uint64_t seed, int count = 50) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> anomaly(0.0, 360.0);
  const auto oe = astro::Elements::from_degrees(25e6, 0.7, 40.0, 358.0, 0.0, anomaly(rng));
  const double t_f = 117990.0;
  std::uniform_int_distribution<int> slot(0, 3933);
  std::set<int> picks;
  while (static_cast<int>(picks.size()) < count) picks.insert(slot(rng));
  std::vector<double> times;
  for (int s : picks) times.push_back(30.0 * s);

  const std::size_t split = std::uniform_int_distribution<std::size_t>(1, times.size() - 1)(rng);
  ControlMode a{1, CostModel::thrusters(CostModel::tetrahedral_rows()), {times.begin(), times.begin() + static_cast<long>(split)}};
  ControlMode b{2, CostModel::one_norm(), {times.begin() + static_cast<long>(split), times.end()}};
  SmallInstance out;
  out.problem = sample_problem({a, b}, [oe, t_f](double t) -> MatrixXd { return astro::gamma<double>(oe, 0.0, t, t_f); });
  out.problem.t_f = t_f;
  out.w = random_target(rng);
  return out;
}

}  // namespace impulse::testing
