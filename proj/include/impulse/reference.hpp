#pragma once

// Reference solvers: the direct generator LP over the whole grid and the indirect method without refinement.

#include "impulse/planner.hpp"

#include <string>
#include <vector>

namespace impulse {

struct PolyhedralApprox {
  CostModel source = CostModel::two_norm();
  std::vector<VectorXd> generators;  // unit-cost points whose hull approximates U(1)
  double rho = 1.0;                  // max sampled support_exact / support_approx
};

/// Polyhedral costs pass through with rho = 1; smooth costs get `facets` boundary points.
PolyhedralApprox polyhedral_approx(const CostModel& cost, int facets);

struct DirectResult {
  ManeuverPlan plan;
  double objective = 0.0;  // LP optimum, sum of generator weights [m/s]
  double rho = 1.0;        // worst approximation factor over the modes
  Index columns = 0;
  int pivots = 0;
};

/// minimize sum alpha  s.t.  sum alpha Gamma(t) g = w, alpha >= 0, over every grid time and generator.
DirectResult solve_direct(const VectorXd& w, const SampledProblem& problem, int facets = 162);

/// Restricted dual over every grid time, then extraction on the times with p >= 0.99.
ManeuverPlan solve_naive_indirect(const VectorXd& w, const SampledProblem& problem, const PlannerConfig& config = {});

struct TimingRow {
  std::string solver;
  bool ok = false;
  std::string error;
  double cost = 0.0;  // [m/s]
  int iterations = 0;
  double min_seconds = 0.0;
  double mean_seconds = 0.0;
  double max_seconds = 0.0;
};

struct CompareReport {
  std::vector<TimingRow> rows;  // planner, naive indirect, direct
  double lower_bound = 0.0;
  double rho = 1.0;
  int repetitions = 0;

  const TimingRow& row(const std::string& solver) const;
};

/// Runs the three solvers `repetitions` times each, sequentially.
CompareReport compare(const VectorXd& w, const SampledProblem& problem, const PlannerConfig& config, int repetitions,
                      int facets = 162);

}  // namespace impulse
