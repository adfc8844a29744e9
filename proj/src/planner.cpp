#include "impulse/planner.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace impulse {

void PlannerConfig::validate(Index state_dim) const {
  if (!(eps_cost > 0.0)) throw Error(ErrorKind::InvalidArgument, "planner config: eps_cost must be positive");
  if (!(eps_remove > 0.0 && eps_remove < 1.0))
    throw Error(ErrorKind::InvalidArgument, "planner config: eps_remove must lie in (0, 1)");
  if (n_init < 1) throw Error(ErrorKind::InvalidArgument, "planner config: n_init must be at least 1");
  if (n_seed_grid < 1) throw Error(ErrorKind::InvalidArgument, "planner config: n_seed_grid must be at least 1");
  if (max_iters < 1) throw Error(ErrorKind::InvalidArgument, "planner config: max_iters must be at least 1");
  if (!(residual_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "planner config: residual_tol must be positive");
  if (q_weight.size()) {
    if (q_weight.rows() != state_dim || q_weight.cols() != state_dim)
      throw Error(ErrorKind::InvalidArgument, "planner config: q_weight has the wrong shape");
    if (!q_weight.isApprox(q_weight.transpose(), 1e-12))
      throw Error(ErrorKind::InvalidArgument, "planner config: q_weight must be symmetric");
    if (Eigen::LLT<MatrixXd>(q_weight).info() != Eigen::Success)
      throw Error(ErrorKind::InvalidArgument, "planner config: q_weight must be positive definite");
  }
}

CandidateSet uniform_candidates(const SampledProblem& problem, int count) {
  if (count < 1) throw Error(ErrorKind::InvalidArgument, "uniform candidates: count must be at least 1");
  std::vector<double> grid;
  for (const auto& m : problem.modes) grid.insert(grid.end(), m.times.begin(), m.times.end());
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  CandidateSet out(problem.modes.size());
  if (grid.empty()) return out;
  for (int k = 0; k < count; ++k) {
    const double target =
        count == 1 ? problem.t_i : problem.t_i + (problem.t_f - problem.t_i) * static_cast<double>(k) / (count - 1);
    auto it = std::lower_bound(grid.begin(), grid.end(), target);
    if (it == grid.end() || (it != grid.begin() && target - *(it - 1) <= *it - target)) --it;
    const double t = *it;
    for (std::size_t j = 0; j < problem.modes.size(); ++j) {
      const auto& times = problem.modes[j].times;
      auto hit = std::lower_bound(times.begin(), times.end(), t);
      if (hit != times.end() && *hit == t) out.insert(j, static_cast<Index>(hit - times.begin()));
    }
  }
  return out;
}

CandidateSet initialize_candidates(const VectorXd& w, const CandidateSet& seeds, const SampledProblem& problem, int o,
                                   const std::optional<VectorXd>& lambda_est) {
  if (o < 1) throw Error(ErrorKind::InvalidArgument, "initialize candidates: o must be at least 1");
  if (seeds.total() == 0) throw Error(ErrorKind::InvalidArgument, "initialize candidates: seed grid is empty");
  const VectorXd lambda = lambda_est ? *lambda_est : w.normalized();
  if (lambda.size() != problem.state_dim)
    throw Error(ErrorKind::InvalidArgument, "initialize candidates: lambda_est has the wrong dimension");

  struct Scored {
    double p;
    double t;
    std::size_t mode;
    Index idx;
  };
  std::vector<Scored> scored;
  for (const auto& [j, k] : seeds.pairs()) {
    const auto& mode = problem.modes[j];
    scored.push_back({support(mode.cost, mode.gamma_transpose(k) * lambda), mode.times[static_cast<std::size_t>(k)], j, k});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.p != b.p) return a.p > b.p;
    if (a.t != b.t) return a.t < b.t;
    return a.mode < b.mode;
  });
  CandidateSet out(problem.modes.size());
  for (std::size_t i = 0; i < scored.size() && i < static_cast<std::size_t>(o); ++i) out.insert(scored[i].mode, scored[i].idx);
  return out;
}

CandidateSet initial_candidates(const VectorXd& w, const SampledProblem& problem, const PlannerConfig& config,
                                InitScheme scheme) {
  switch (scheme) {
    case InitScheme::Endpoints:
      return uniform_candidates(problem, 2);
    case InitScheme::Uniform:
      return uniform_candidates(problem, 10);
    case InitScheme::Seeded:
      break;
  }
  return initialize_candidates(w, uniform_candidates(problem, config.n_seed_grid), problem, config.n_init);
}

RefineResult refine(const VectorXd& w, CandidateSet cands, const SampledProblem& problem, const PlannerConfig& config) {
  config.validate(problem.state_dim);
  RefineResult out;
  CutPool pool;
  DualOptions opts;
  opts.allow_box_limited = true;
  double best_upper = std::numeric_limits<double>::infinity();
  double best_lower = 0.0;

  for (int it = 1; it <= config.max_iters; ++it) {
    DualSolution sol;
    try {
      sol = solve_restricted_dual(w, cands, problem, opts, &pool);
    } catch (const Error& e) {
      throw PlanningError(e.kind(), e.what(), out.trace, best_upper, best_lower);
    }
    const auto values = profile_all(sol.lambda, problem);
    const double pmax = profile_max(values);

    IterationRecord rec;
    rec.iteration = it;
    rec.objective = sol.objective;
    rec.max_profile = pmax;
    rec.candidates = cands.total();
    if (!sol.box_limited) {
      best_upper = std::min(best_upper, sol.objective);
      if (pmax > 0.0) best_lower = std::max(best_lower, sol.objective / pmax);
    }

    if (!sol.box_limited && pmax <= 1.0 + config.eps_cost) {
      out.trace.push_back(rec);
      out.dual = std::move(sol);
      out.candidates = std::move(cands);
      out.max_profile = pmax;
      out.lower_bound = out.dual.objective / pmax;
      out.iterations = it;
      return out;
    }

    if (!sol.box_limited) {
      for (const auto& [j, k] : cands.pairs()) {
        if (values[j](k) < 1.0 - config.eps_remove) {
          cands.erase(j, k);
          ++rec.removed;
        }
      }
    }
    for (const auto& [j, k] : local_maxima(values, 1.0))
      if (cands.insert(j, k)) ++rec.added;
    out.trace.push_back(rec);

    if (rec.added == 0) {
      if (sol.box_limited)
        throw PlanningError(ErrorKind::Unreachable, "target unreachable: restricted dual stays unbounded on the grid",
                            out.trace, best_upper, best_lower);
      throw PlanningError(ErrorKind::Internal, "refinement stalled: no profile maximum above 1 to add", out.trace,
                          best_upper, best_lower);
    }
  }
  throw PlanningError(ErrorKind::IterationLimit,
                      "refinement did not converge within " + std::to_string(config.max_iters) + " iterations", out.trace,
                      best_upper, best_lower);
}

namespace {

struct Column {
  std::size_t mode;
  Index idx;
  VectorXd u_hat;
};

struct Extraction {
  std::vector<Impulse> impulses;
  double total = 0.0;
  double residual = std::numeric_limits<double>::infinity();
};

Extraction extract_on(const VectorXd& w, const VectorXd& lambda, const std::vector<std::pair<std::size_t, Index>>& pairs,
                      const SampledProblem& problem, const PlannerConfig& config, double alpha_min) {
  std::vector<Column> cols;
  for (const auto& [j, k] : pairs) {
    const auto& mode = problem.modes[j];
    const VectorXd v = mode.gamma_transpose(k) * lambda;
    if (!(support(mode.cost, v) > 0.0)) continue;
    for (auto& g : support_generators(mode.cost, v)) cols.push_back({j, k, std::move(g)});
  }
  Extraction out;
  if (cols.empty()) return out;

  auto solve = [&](const std::vector<Column>& use) {
    MatrixXd y(w.size(), static_cast<Index>(use.size()));
    for (std::size_t c = 0; c < use.size(); ++c)
      y.col(static_cast<Index>(c)) = problem.modes[use[c].mode].gamma(use[c].idx) * use[c].u_hat;
    return nnls(y, w, config.q_weight).alpha;
  };

  VectorXd alpha = solve(cols);
  std::vector<Column> kept;
  for (std::size_t c = 0; c < cols.size(); ++c)
    if (alpha(static_cast<Index>(c)) >= alpha_min) kept.push_back(cols[c]);
  if (kept.size() != cols.size()) {
    cols = std::move(kept);
    alpha = cols.empty() ? VectorXd() : solve(cols);
  }

  std::map<std::pair<std::size_t, Index>, VectorXd> sums;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const double a = alpha(static_cast<Index>(c));
    if (a <= 0.0) continue;
    auto key = std::make_pair(cols[c].mode, cols[c].idx);
    auto it = sums.find(key);
    if (it == sums.end())
      sums.emplace(key, a * cols[c].u_hat);
    else
      it->second += a * cols[c].u_hat;
  }

  VectorXd reached = VectorXd::Zero(w.size());
  for (const auto& [key, u] : sums) {
    const auto& mode = problem.modes[key.first];
    Impulse imp;
    imp.t = mode.times[static_cast<std::size_t>(key.second)];
    imp.mode_id = mode.id;
    imp.mode_index = key.first;
    imp.time_index = key.second;
    imp.u = u;
    imp.cost = cost_of(mode.cost, u);
    reached += mode.gamma(key.second) * u;
    out.impulses.push_back(std::move(imp));
  }
  std::sort(out.impulses.begin(), out.impulses.end(), [](const Impulse& a, const Impulse& b) {
    return a.t != b.t ? a.t < b.t : a.mode_index < b.mode_index;
  });
  for (const auto& imp : out.impulses) out.total += imp.cost;
  out.residual = (w - reached).norm() / w.norm();
  return out;
}

double effective_alpha_min(const PlannerConfig& config, double objective) {
  return config.alpha_min > 0.0 ? config.alpha_min : 1e-6 * objective;
}

}  // namespace

ManeuverPlan extract_inputs(const VectorXd& w, const RefineResult& refined, const SampledProblem& problem,
                            const PlannerConfig& config) {
  const VectorXd& lambda = refined.dual.lambda;
  const auto values = profile_all(lambda, problem);
  std::vector<std::pair<std::size_t, Index>> strict;
  std::vector<std::pair<std::size_t, Index>> loose;
  for (const auto& [j, k] : refined.candidates.pairs()) {
    const double p = values[j](k);
    if (p >= 1.0 - 1e-6) strict.emplace_back(j, k);
    if (p >= 1.0 - config.eps_remove) loose.emplace_back(j, k);
  }
  const double alpha_min = effective_alpha_min(config, refined.dual.objective);

  Extraction best;
  bool found = false;
  double best_residual = std::numeric_limits<double>::infinity();
  for (const auto* set : {&strict, &loose}) {
    if (set->empty() || (set == &loose && loose.size() == strict.size())) continue;
    Extraction e = extract_on(w, lambda, *set, problem, config, alpha_min);
    best_residual = std::min(best_residual, e.residual);
    if (e.residual <= config.residual_tol && (!found || e.total < best.total)) {
      best = std::move(e);
      found = true;
    }
  }
  if (!found)
    throw PlanningError(ErrorKind::ExtractionFailed,
                        "extraction failed: best normalized residual " + std::to_string(best_residual) + " exceeds " +
                            std::to_string(config.residual_tol),
                        refined.trace, refined.dual.objective, refined.lower_bound);

  ManeuverPlan plan;
  plan.impulses = std::move(best.impulses);
  plan.total_cost = best.total;
  plan.residual = best.residual;
  plan.lower_bound = refined.lower_bound;
  plan.iterations = refined.iterations;
  plan.dual = refined.dual;
  plan.trace = refined.trace;
  plan.max_profile = refined.max_profile;
  plan.certificate_ok = plan.total_cost <= (1.0 + config.eps_cost) * plan.lower_bound + 1e-9;
  return plan;
}

LowerBound lower_bound(const VectorXd& w, const std::vector<VectorXd>& lambda_samples, const SampledProblem& problem) {
  LowerBound out;
  bool any = false;
  for (const auto& sample : lambda_samples) {
    if (sample.size() != problem.state_dim)
      throw Error(ErrorKind::InvalidArgument, "lower bound: lambda sample has the wrong dimension");
    const double num = sample.dot(w);
    if (!(num > 0.0)) continue;
    ++out.used;
    const double den = profile_max(profile_all(sample, problem));
    if (!(den > 0.0))
      throw Error(ErrorKind::Unreachable, "target unreachable: a sample with positive lambda^T w has zero support everywhere");
    const double bound = num / den;
    if (!any || bound > out.bound) {
      out.bound = bound;
      out.lambda = sample;
      any = true;
    }
  }
  if (!any) throw Error(ErrorKind::InvalidArgument, "lower bound: no sample has lambda^T w > 0");
  return out;
}

ManeuverPlan plan(const VectorXd& w, const SampledProblem& problem, const PlannerConfig& config, InitScheme scheme) {
  if (w.size() != problem.state_dim) throw Error(ErrorKind::InvalidArgument, "plan: w has the wrong dimension");
  config.validate(problem.state_dim);
  if (w.norm() == 0.0) {
    ManeuverPlan empty;
    empty.dual.lambda = VectorXd::Zero(w.size());
    return empty;
  }
  const auto refined = refine(w, initial_candidates(w, problem, config, scheme), problem, config);
  return extract_inputs(w, refined, problem, config);
}

PlanAudit audit_plan(const ManeuverPlan& plan, const VectorXd& w, const SampledProblem& problem,
                     const PlannerConfig& config) {
  PlanAudit a;
  const double wn = w.norm();
  VectorXd reached = VectorXd::Zero(w.size());
  a.grid_ok = true;
  a.direction_ok = true;
  double total = 0.0;
  const double alpha_min = effective_alpha_min(config, plan.dual.objective);
  for (const auto& imp : plan.impulses) {
    if (imp.mode_index >= problem.modes.size()) {
      a.grid_ok = false;
      continue;
    }
    const auto& mode = problem.modes[imp.mode_index];
    if (imp.time_index < 0 || imp.time_index >= mode.size() || mode.times[static_cast<std::size_t>(imp.time_index)] != imp.t ||
        mode.id != imp.mode_id) {
      a.grid_ok = false;
      continue;
    }
    reached += mode.gamma(imp.time_index) * imp.u;
    const double c = cost_of(mode.cost, imp.u);
    total += c;
    if (c >= alpha_min) ++a.impulse_count;
    const VectorXd v = mode.gamma_transpose(imp.time_index) * plan.dual.lambda;
    const double expect = c * support(mode.cost, v);
    const double err = std::abs(v.dot(imp.u) - expect) / std::max(std::abs(expect), 1e-300);
    a.worst_direction_error = std::max(a.worst_direction_error, err);
    if (err > 1e-9) a.direction_ok = false;
  }
  a.reach_ok = wn == 0.0 ? reached.norm() == 0.0 : (w - reached).norm() <= config.residual_tol * wn;
  const double dual_value = plan.dual.lambda.size() ? plan.dual.lambda.dot(w) : 0.0;
  a.cost_ok = std::abs(total - dual_value) <= 10.0 * config.eps_cost * std::max(dual_value, 0.0) + 1e-12;
  return a;
}

}  // namespace impulse
