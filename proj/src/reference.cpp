#include "impulse/reference.hpp"

#include "impulse/lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

namespace impulse {

namespace {

std::vector<VectorXd> sphere_points(Index dim, int count) {
  std::vector<VectorXd> out;
  if (dim == 1) {
    out.push_back(VectorXd::Constant(1, 1.0));
    out.push_back(VectorXd::Constant(1, -1.0));
  } else if (dim == 2) {
    for (int k = 0; k < count; ++k) {
      const double a = 2.0 * std::numbers::pi * k / count;
      out.push_back(Eigen::Vector2d(std::cos(a), std::sin(a)));
    }
  } else if (dim == 3) {
    // Fibonacci lattice
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < count; ++k) {
      const double z = 1.0 - 2.0 * (k + 0.5) / count;
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double phi = golden * k;
      out.push_back(Vector3(r * std::cos(phi), r * std::sin(phi), z));
    }
  } else {
    throw Error(ErrorKind::InvalidArgument, "polyhedral approximation: two-norm supported in dimensions 1 to 3");
  }
  return out;
}

double measure_rho(const CostModel& cost, const std::vector<VectorXd>& gens) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  const Index m = cost.input_dim();
  MatrixXd rows(static_cast<Index>(gens.size()), m);
  for (std::size_t k = 0; k < gens.size(); ++k) rows.row(static_cast<Index>(k)) = gens[k].transpose();
  double rho = 1.0;
  for (int s = 0; s < 10000; ++s) {
    const VectorXd v = VectorXd::NullaryExpr(m, [&] { return g(rng); }).normalized();
    const double approx = (rows * v).maxCoeff();
    if (approx > 0.0) rho = std::max(rho, support(cost, v) / approx);
  }
  return rho;
}

template <typename F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

PolyhedralApprox polyhedral_approx(const CostModel& cost, int facets) {
  if (facets < 4) throw Error(ErrorKind::InvalidArgument, "polyhedral approximation: facets must be at least 4");
  PolyhedralApprox out;
  out.source = cost;
  if (cost.is_polyhedral()) {
    out.generators = cost.vertices();
    return out;
  }
  const auto& var = cost.variant();
  if (std::holds_alternative<TwoNorm>(var)) {
    out.generators = sphere_points(cost.input_dim(), facets);
  } else if (const auto* mx = std::get_if<MixedAxis>(&var)) {
    const Index m = cost.input_dim();
    VectorXd e = VectorXd::Zero(m);
    e(mx->fixed_axis) = 1.0;
    out.generators.push_back(e);
    out.generators.push_back(-e);
    for (const auto& p : sphere_points(m - 1, facets)) {
      VectorXd g = VectorXd::Zero(m);
      for (Index c = 0, r = 0; c < m; ++c)
        if (c != mx->fixed_axis) g(c) = p(r++);
      out.generators.push_back(g);
    }
  } else {
    throw Error(ErrorKind::InvalidArgument, "polyhedral approximation: custom costs are not supported");
  }
  out.rho = measure_rho(cost, out.generators);
  return out;
}

DirectResult solve_direct(const VectorXd& w, const SampledProblem& problem, int facets) {
  DirectResult out;
  if (w.norm() == 0.0) {
    out.plan.dual.lambda = VectorXd::Zero(w.size());
    return out;
  }
  std::vector<PolyhedralApprox> approx;
  for (const auto& m : problem.modes) {
    approx.push_back(polyhedral_approx(m.cost, facets));
    out.rho = std::max(out.rho, approx.back().rho);
  }

  struct Col {
    std::size_t mode;
    Index idx;
    std::size_t gen;
  };
  std::vector<Col> cols;
  std::vector<double> scales;
  const VectorXd w_hat = w.normalized();
  for (std::size_t j = 0; j < problem.modes.size(); ++j) {
    const auto& mode = problem.modes[j];
    for (Index k = 0; k < mode.size(); ++k) {
      const double h = support(mode.cost, mode.gamma_transpose(k) * w_hat);
      if (h > 0.0) scales.push_back(h);
    }
  }
  if (scales.empty()) throw Error(ErrorKind::Unreachable, "target unreachable on grid: no ascent direction along w");
  std::nth_element(scales.begin(), scales.begin() + static_cast<long>(scales.size() / 2), scales.end());
  double box = 10.0 / scales[scales.size() / 2];

  BoxedLp lp(w, box);
  for (std::size_t j = 0; j < problem.modes.size(); ++j) {
    const auto& mode = problem.modes[j];
    for (Index k = 0; k < mode.size(); ++k) {
      const auto gt = mode.gamma_transpose(k);
      for (std::size_t g = 0; g < approx[j].generators.size(); ++g) {
        lp.add_row(gt.transpose() * approx[j].generators[g], 1.0);
        cols.push_back({j, k, g});
      }
    }
  }
  out.columns = static_cast<Index>(cols.size());

  for (int doublings = 0;; ++doublings) {
    if (lp.solve() != LpStatus::Optimal) throw Error(ErrorKind::Internal, "direct LP did not reach an optimum");
    if (lp.box_dual() <= 1e-10 * std::abs(lp.objective())) break;
    if (doublings == 30) throw Error(ErrorKind::Unreachable, "target unreachable on grid: direct LP needs slack");
    box *= 2.0;
    lp.set_box(box);
  }
  out.pivots = lp.pivots();
  out.objective = lp.objective();

  const VectorXd alpha = lp.row_duals();
  std::map<std::pair<std::size_t, Index>, VectorXd> sums;
  for (std::size_t c = 0; c < cols.size(); ++c) {
    const double a = alpha(static_cast<Index>(c));
    if (a <= 0.0) continue;
    const VectorXd u = a * approx[cols[c].mode].generators[cols[c].gen];
    auto key = std::make_pair(cols[c].mode, cols[c].idx);
    auto it = sums.find(key);
    if (it == sums.end())
      sums.emplace(key, u);
    else
      it->second += u;
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
    out.plan.total_cost += imp.cost;
    out.plan.impulses.push_back(std::move(imp));
  }
  std::sort(out.plan.impulses.begin(), out.plan.impulses.end(),
            [](const Impulse& a, const Impulse& b) { return a.t != b.t ? a.t < b.t : a.mode_index < b.mode_index; });
  out.plan.residual = (w - reached).norm() / w.norm();
  out.plan.dual.lambda = lp.x();
  out.plan.dual.objective = out.objective;
  out.plan.iterations = 1;
  return out;
}

ManeuverPlan solve_naive_indirect(const VectorXd& w, const SampledProblem& problem, const PlannerConfig& config) {
  config.validate(problem.state_dim);
  if (w.norm() == 0.0) {
    ManeuverPlan empty;
    empty.dual.lambda = VectorXd::Zero(w.size());
    return empty;
  }
  RefineResult r;
  r.dual = solve_restricted_dual(w, CandidateSet::all(problem), problem);
  const auto values = profile_all(r.dual.lambda, problem);
  r.candidates = CandidateSet(problem.modes.size());
  for (std::size_t j = 0; j < values.size(); ++j)
    for (Index k = 0; k < values[j].size(); ++k)
      if (values[j](k) >= 0.99) r.candidates.insert(j, k);
  r.max_profile = profile_max(values);
  r.lower_bound = r.dual.objective / r.max_profile;
  r.iterations = 1;
  IterationRecord rec;
  rec.iteration = 1;
  rec.objective = r.dual.objective;
  rec.max_profile = r.max_profile;
  rec.candidates = problem.total_times();
  r.trace.push_back(rec);
  return extract_inputs(w, r, problem, config);
}

const TimingRow& CompareReport::row(const std::string& solver) const {
  for (const auto& r : rows)
    if (r.solver == solver) return r;
  throw Error(ErrorKind::InvalidArgument, "compare report has no row '" + solver + "'");
}

CompareReport compare(const VectorXd& w, const SampledProblem& problem, const PlannerConfig& config, int repetitions,
                      int facets) {
  if (repetitions < 1) throw Error(ErrorKind::InvalidArgument, "compare: repetitions must be at least 1");
  CompareReport report;
  report.repetitions = repetitions;

  auto timed = [&](const std::string& name, auto&& run) {
    TimingRow row;
    row.solver = name;
    std::vector<double> times;
    try {
      for (int r = 0; r < repetitions; ++r) times.push_back(seconds([&] { run(row); }));
      row.ok = true;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    if (!times.empty()) {
      row.min_seconds = *std::min_element(times.begin(), times.end());
      row.max_seconds = *std::max_element(times.begin(), times.end());
      double sum = 0.0;
      for (double t : times) sum += t;
      row.mean_seconds = sum / static_cast<double>(times.size());
    }
    report.rows.push_back(row);
  };

  timed("planner", [&](TimingRow& row) {
    const auto p = plan(w, problem, config);
    row.cost = p.total_cost;
    row.iterations = p.iterations;
    report.lower_bound = p.lower_bound;
  });
  timed("naive_indirect", [&](TimingRow& row) {
    const auto p = solve_naive_indirect(w, problem, config);
    row.cost = p.total_cost;
    row.iterations = p.iterations;
  });
  timed("direct", [&](TimingRow& row) {
    const auto d = solve_direct(w, problem, facets);
    row.cost = d.plan.total_cost;
    row.iterations = 1;
    report.rho = d.rho;
  });
  return report;
}

}  // namespace impulse
