#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "impulse/dual.hpp"

#include <Eigen/Dense>

#include <cmath>
#include <numbers>
#include <random>

using namespace impulse;

namespace {

SampledProblem table_problem(const std::vector<MatrixXd>& gammas, const CostModel& cost, int id = 1) {
  ControlMode mode;
  mode.id = id;
  mode.cost = cost;
  for (std::size_t k = 0; k < gammas.size(); ++k) mode.times.push_back(static_cast<double>(k));
  return sample_problem({mode}, [&](double t) { return gammas[static_cast<std::size_t>(t)]; });
}

std::vector<MatrixXd> random_gammas(std::mt19937_64& rng, int count, Index n, Index m) {
  std::normal_distribution<double> g;
  std::vector<MatrixXd> out;
  for (int k = 0; k < count; ++k) out.push_back(MatrixXd::NullaryExpr(n, m, [&] { return g(rng); }));
  return out;
}

// 2-D restricted dual by direction sweep: lambda = d / max_k support(Gamma_k^T d).
double sweep_dual_2d(const std::vector<MatrixXd>& gammas, const CostModel& cost, const VectorXd& w) {
  auto value = [&](double th) {
    const Eigen::Vector2d d(std::cos(th), std::sin(th));
    double s = 0.0;
    for (const auto& g : gammas) s = std::max(s, support(cost, g.transpose() * d));
    return s > 0.0 ? d.dot(w) / s : -1e300;
  };
  const int n = 200000;
  const double step = 2.0 * std::numbers::pi / n;
  double best_th = 0.0;
  double best = -1e300;
  for (int i = 0; i < n; ++i) {
    const double v = value(i * step);
    if (v > best) {
      best = v;
      best_th = i * step;
    }
  }
  // golden section on the bracketing cell
  double lo = best_th - step;
  double hi = best_th + step;
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  for (int it = 0; it < 100; ++it) {
    const double a = hi - r * (hi - lo);
    const double b = lo + r * (hi - lo);
    if (value(a) > value(b))
      hi = b;
    else
      lo = a;
  }
  return std::max(best, value(0.5 * (lo + hi)));
}

double candidate_max(const DualSolution& sol, const CandidateSet& cands, const SampledProblem& problem) {
  double best = 0.0;
  for (const auto& [j, k] : cands.pairs()) {
    const auto& mode = problem.modes[j];
    best = std::max(best, support(mode.cost, mode.gamma_transpose(k) * sol.lambda));
  }
  return best;
}

}  // namespace

TEST_CASE("identity gamma gives the normalized target") {
  const auto problem = table_problem({MatrixXd::Identity(6, 6)}, CostModel::two_norm(6));
  VectorXd w(6);
  w << 50, 5000, 100, 100, 0, 400;
  const auto sol = solve_restricted_dual(w, CandidateSet::all(problem), problem);
  CHECK((sol.lambda - w / w.norm()).norm() <= 1e-9);
  CHECK(sol.objective == doctest::Approx(w.norm()).epsilon(1e-10));
  CHECK(sol.active.size() == 1);
}

TEST_CASE("duplicated candidates change nothing") {
  std::mt19937_64 rng(7);
  const auto gammas = random_gammas(rng, 8, 4, 3);
  ControlMode a{1, CostModel::two_norm(), {0, 1, 2, 3, 4, 5, 6, 7}};
  ControlMode b{2, CostModel::two_norm(), {0, 1, 2, 3, 4, 5, 6, 7}};
  auto provider = [&](double t) { return gammas[static_cast<std::size_t>(t)]; };
  const auto single = sample_problem({a}, provider);
  const auto doubled = sample_problem({a, b}, provider);
  VectorXd w = VectorXd::NullaryExpr(4, [&] { return std::normal_distribution<double>()(rng); });
  const auto s1 = solve_restricted_dual(w, CandidateSet::all(single), single);
  const auto s2 = solve_restricted_dual(w, CandidateSet::all(doubled), doubled);
  CHECK(s2.objective == doctest::Approx(s1.objective).epsilon(1e-9));
  CHECK((s2.lambda - s1.lambda).norm() <= 1e-6 * s1.lambda.norm());
}

TEST_CASE("two-norm restricted dual matches a direction sweep") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const auto gammas = random_gammas(rng, 1 + trial % 5, 2, 2);
    const auto problem = table_problem(gammas, CostModel::two_norm(2));
    VectorXd w = VectorXd::NullaryExpr(2, [&] { return std::normal_distribution<double>()(rng); });
    const auto sol = solve_restricted_dual(w, CandidateSet::all(problem), problem);
    const double oracle = sweep_dual_2d(gammas, CostModel::two_norm(2), w);
    CAPTURE(trial);
    CHECK(sol.objective == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(sol.upper_bound >= sol.objective * (1.0 - 1e-12));
    CHECK(candidate_max(sol, CandidateSet::all(problem), problem) <= 1.0 + 1e-9);
  }
}

TEST_CASE("one-norm and thruster restricted duals match a direction sweep") {
  std::mt19937_64 rng(12);
  MatrixXd tri(3, 2);
  tri << 1, 0, -0.5, std::sqrt(3.0) / 2, -0.5, -std::sqrt(3.0) / 2;
  for (const auto& cost : {CostModel::one_norm(2), CostModel::thrusters(tri)}) {
    for (int trial = 0; trial < 10; ++trial) {
      const auto gammas = random_gammas(rng, 1 + trial % 4, 2, 2);
      const auto problem = table_problem(gammas, cost);
      VectorXd w = VectorXd::NullaryExpr(2, [&] { return std::normal_distribution<double>()(rng); });
      const auto sol = solve_restricted_dual(w, CandidateSet::all(problem), problem);
      CAPTURE(trial);
      CHECK(sol.objective == doctest::Approx(sweep_dual_2d(gammas, cost, w)).epsilon(1e-8));
      CHECK(sol.upper_bound == doctest::Approx(sol.objective).epsilon(1e-9));
    }
  }
}

TEST_CASE("adding candidates never increases the restricted objective") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    const auto gammas = random_gammas(rng, 30, 6, 3);
    const auto cost = trial % 2 ? CostModel::two_norm() : CostModel::thrusters(CostModel::tetrahedral_rows());
    const auto problem = table_problem(gammas, cost);
    VectorXd w = VectorXd::NullaryExpr(6, [&] { return std::normal_distribution<double>()(rng); });
    CandidateSet cands(1);
    for (Index k = 0; k < 8; ++k) cands.insert(0, k);
    double last = solve_restricted_dual(w, cands, problem).objective;
    for (Index k = 8; k < 30; ++k) {
      cands.insert(0, k);
      const double obj = solve_restricted_dual(w, cands, problem).objective;
      CAPTURE(trial);
      CAPTURE(k);
      CHECK(obj <= last * (1.0 + 1e-9));
      last = obj;
    }
  }
}

TEST_CASE("cuts are valid for every candidate-feasible lambda") {
  // A cut at (t, g) reads lambda^T Gamma(t) g <= 1 with g in U(1).
  std::mt19937_64 rng(31);
  std::normal_distribution<double> g;
  const auto gammas = random_gammas(rng, 10, 6, 3);
  for (const auto& cost : {CostModel::two_norm(), CostModel::one_norm(), CostModel::thrusters(CostModel::tetrahedral_rows()),
                           CostModel::mixed_axis(0)}) {
    for (int trial = 0; trial < 200; ++trial) {
      VectorXd lambda = VectorXd::NullaryExpr(6, [&] { return g(rng); });
      double s = 0.0;
      for (const auto& gm : gammas) s = std::max(s, support(cost, gm.transpose() * lambda));
      lambda /= s;
      for (const auto& gm : gammas) {
        const VectorXd v = gm.transpose() * VectorXd::NullaryExpr(6, [&] { return g(rng); });
        for (const auto& gen : support_generators(cost, v)) CHECK(lambda.dot(gm * gen) <= 1.0 + 1e-12);
      }
    }
  }
}

TEST_CASE("restricted dual errors") {
  const auto problem = table_problem({MatrixXd::Identity(3, 3)}, CostModel::two_norm());
  CHECK_THROWS_AS(solve_restricted_dual(VectorXd::Zero(3), CandidateSet::all(problem), problem), Error);
  try {
    solve_restricted_dual(VectorXd::Zero(3), CandidateSet::all(problem), problem);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::TrivialProblem);
  }
  try {
    solve_restricted_dual(VectorXd::Ones(3), CandidateSet(1), problem);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InsufficientCandidates);
  }
  // one column only: w off that line is unreachable
  MatrixXd col = MatrixXd::Zero(3, 3);
  col(0, 0) = 1.0;
  const auto flat = table_problem({col}, CostModel::two_norm());
  try {
    solve_restricted_dual(Eigen::Vector3d(1, 1, 0), CandidateSet::all(flat), flat);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DualUnbounded);
  }
  DualOptions opts;
  opts.allow_box_limited = true;
  opts.max_box_doublings = 3;
  const auto limited = solve_restricted_dual(Eigen::Vector3d(1, 1, 0), CandidateSet::all(flat), flat, opts);
  CHECK(limited.box_limited);
}

TEST_CASE("cut pool reuse gives the same solution") {
  std::mt19937_64 rng(41);
  const auto gammas = random_gammas(rng, 20, 6, 3);
  const auto problem = table_problem(gammas, CostModel::two_norm());
  VectorXd w = VectorXd::NullaryExpr(6, [&] { return std::normal_distribution<double>()(rng); });
  CutPool pool;
  const auto first = solve_restricted_dual(w, CandidateSet::all(problem), problem, {}, &pool);
  CHECK(pool.size() > 0);
  const auto second = solve_restricted_dual(w, CandidateSet::all(problem), problem, {}, &pool);
  CHECK(second.objective == doctest::Approx(first.objective).epsilon(1e-9));
  CHECK(second.rounds <= first.rounds);
}

TEST_CASE("profiles") {
  std::mt19937_64 rng(51);
  const auto gammas = random_gammas(rng, 12, 6, 3);
  for (const auto& cost : {CostModel::two_norm(), CostModel::one_norm(), CostModel::thrusters(CostModel::tetrahedral_rows()),
                           CostModel::mixed_axis(2)}) {
    const auto problem = table_problem(gammas, cost);
    const auto& mode = problem.modes[0];
    CHECK(profile_values(VectorXd::Zero(6), mode).cwiseAbs().maxCoeff() == 0.0);
    VectorXd lambda = VectorXd::NullaryExpr(6, [&] { return std::normal_distribution<double>()(rng); });
    const VectorXd p = profile_values(lambda, mode);
    const VectorXd p2 = profile_values(2.0 * lambda, mode);
    CHECK((p2 - 2.0 * p).cwiseAbs().maxCoeff() <= 1e-12 * p.maxCoeff());
    for (Index k = 0; k < mode.size(); ++k) {
      CHECK(p(k) >= 0.0);
      CHECK(p(k) == doctest::Approx(support(cost, gammas[static_cast<std::size_t>(k)].transpose() * lambda)).epsilon(1e-12));
    }
    const auto samples = profile(lambda, mode);
    REQUIRE(samples.size() == 12);
    CHECK(samples[3].t == 3.0);
    CHECK(samples[3].mode_id == 1);
  }
}

TEST_CASE("local maxima") {
  auto one = [](std::initializer_list<double> v) {
    VectorXd p(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) p(i++) = x;
    return std::vector<VectorXd>{p};
  };
  const auto peaks = local_maxima(one({0.9, 1.2, 1.0, 1.3, 1.1}), 1.0);
  REQUIRE(peaks.size() == 2);
  CHECK(peaks[0].second == 1);
  CHECK(peaks[1].second == 3);

  const auto rising = local_maxima(one({0.1, 0.5, 0.9, 1.4, 2.0}), 1.0);
  REQUIRE(rising.size() == 1);
  CHECK(rising[0].second == 4);

  CHECK(local_maxima(one({0.1, 0.9, 1.0, 0.3}), 1.0).empty());

  const auto plateau = local_maxima(one({1.0, 1.5, 1.5, 1.5, 1.2}), 1.0);
  REQUIRE(plateau.size() == 1);
  CHECK(plateau[0].second == 1);

  auto two = one({1.1, 0.5});
  two.push_back(one({0.5, 2.0})[0]);
  const auto multi = local_maxima(two, 1.0);
  REQUIRE(multi.size() == 2);
  CHECK(multi[0] == std::pair<std::size_t, Index>{0, 0});
  CHECK(multi[1] == std::pair<std::size_t, Index>{1, 1});
}
