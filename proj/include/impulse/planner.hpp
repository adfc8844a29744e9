#pragma once

// Candidate initialization, iterative refinement, input extraction, lower bounds and plan audits.

#include "impulse/dual.hpp"
#include "impulse/nnls.hpp"

#include <optional>
#include <vector>

namespace impulse {

struct PlannerConfig {
  double eps_cost = 0.01;
  double eps_remove = 0.01;
  int n_init = 6;
  int n_seed_grid = 20;
  MatrixXd q_weight;       // empty means identity
  double alpha_min = 0.0;  // [m/s]; <= 0 selects 1e-6 * lambda^T w
  int max_iters = 50;
  double residual_tol = 1e-4;

  void validate(Index state_dim) const;
};

enum class InitScheme { Endpoints, Seeded, Uniform };

struct Impulse {
  double t = 0.0;
  int mode_id = 0;
  std::size_t mode_index = 0;
  Index time_index = 0;
  VectorXd u;         // [m/s]
  double cost = 0.0;  // [m/s]
};

struct RefineResult {
  DualSolution dual;
  CandidateSet candidates;
  std::vector<IterationRecord> trace;
  double max_profile = 0.0;  // full-grid max of p for dual.lambda
  double lower_bound = 0.0;  // dual.objective / max_profile
  int iterations = 0;
};

struct ManeuverPlan {
  std::vector<Impulse> impulses;
  double total_cost = 0.0;
  double lower_bound = 0.0;
  double residual = 0.0;  // ||w - sum Gamma u|| / ||w||
  int iterations = 0;
  DualSolution dual;
  std::vector<IterationRecord> trace;
  double max_profile = 0.0;
  bool certificate_ok = true;  // total_cost <= (1 + eps_cost) lower_bound + 1e-9

  double gap() const { return lower_bound > 0.0 ? total_cost / lower_bound : 1.0; }
};

/// Evenly spaced times on [t_i, t_f] snapped to the nearest grid time; every mode admitting the
/// snapped time receives it.
CandidateSet uniform_candidates(const SampledProblem& problem, int count);

/// The o seed pairs with the largest support(Gamma^T lambda_est); lambda_est defaults to w / ||w||.
/// Ties go to the earlier time, then the lower mode index.
CandidateSet initialize_candidates(const VectorXd& w, const CandidateSet& seeds, const SampledProblem& problem, int o,
                                   const std::optional<VectorXd>& lambda_est = std::nullopt);

CandidateSet initial_candidates(const VectorXd& w, const SampledProblem& problem, const PlannerConfig& config,
                                InitScheme scheme);

/// Solve, prune, augment until the full-grid profile max is at most 1 + eps_cost.
RefineResult refine(const VectorXd& w, CandidateSet cands, const SampledProblem& problem, const PlannerConfig& config);

/// Impulses from the converged dual by nonnegative least squares on the argmax directions.
ManeuverPlan extract_inputs(const VectorXd& w, const RefineResult& refined, const SampledProblem& problem,
                            const PlannerConfig& config);

struct LowerBound {
  double bound = 0.0;
  VectorXd lambda;
  std::size_t used = 0;  // samples with lambda^T w > 0
};

/// max over samples of lambda^T w / (full-grid max support).
LowerBound lower_bound(const VectorXd& w, const std::vector<VectorXd>& lambda_samples, const SampledProblem& problem);

ManeuverPlan plan(const VectorXd& w, const SampledProblem& problem, const PlannerConfig& config = {},
                  InitScheme scheme = InitScheme::Seeded);

struct PlanAudit {
  bool reach_ok = false;      // sum Gamma u = w to residual_tol
  bool cost_ok = false;       // total cost vs lambda^T w within 10 eps_cost
  bool direction_ok = false;  // v^T u = cost * support(v) at every impulse
  bool grid_ok = false;       // impulse times belong to their modes
  Index impulse_count = 0;    // impulses above alpha_min
  double worst_direction_error = 0.0;
  bool ok() const { return reach_ok && cost_ok && direction_ok && grid_ok; }
};

PlanAudit audit_plan(const ManeuverPlan& plan, const VectorXd& w, const SampledProblem& problem,
                     const PlannerConfig& config = {});

}  // namespace impulse
