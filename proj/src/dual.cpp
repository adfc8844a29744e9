#include "impulse/dual.hpp"

#include "impulse/lp.hpp"
#include "impulse/nnls.hpp"

#include <Eigen/QR>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

namespace impulse {

Index SampledProblem::total_times() const {
  Index total = 0;
  for (const auto& m : modes) total += m.size();
  return total;
}

SampledProblem sample_problem(const ModeSchedule& schedule, const GammaProvider& gamma) {
  validate_schedule(schedule);
  SampledProblem out;
  out.t_i = std::numeric_limits<double>::infinity();
  out.t_f = -std::numeric_limits<double>::infinity();
  bool first = true;
  for (const auto& mode : schedule) {
    SampledMode sm;
    sm.id = mode.id;
    sm.cost = mode.cost;
    sm.times = mode.times;
    const Index m = mode.cost.input_dim();
    for (std::size_t j = 0; j < mode.times.size(); ++j) {
      const MatrixXd g = gamma(mode.times[j]);
      if (first) {
        out.state_dim = g.rows();
        first = false;
      }
      if (g.rows() != out.state_dim || g.cols() != m)
        throw Error(ErrorKind::InvalidArgument, "sample_problem: gamma has the wrong shape for mode " + std::to_string(mode.id));
      if (!g.allFinite()) throw Error(ErrorKind::InvalidArgument, "sample_problem: non-finite gamma");
      if (j == 0) sm.gamma_t.resize(m * static_cast<Index>(mode.times.size()), out.state_dim);
      sm.gamma_t.middleRows(static_cast<Index>(j) * m, m) = g.transpose();
    }
    out.t_i = std::min(out.t_i, mode.times.front());
    out.t_f = std::max(out.t_f, mode.times.back());
    out.modes.push_back(std::move(sm));
  }
  return out;
}

CandidateSet CandidateSet::all(const SampledProblem& problem) {
  CandidateSet c(problem.modes.size());
  for (std::size_t j = 0; j < problem.modes.size(); ++j) {
    c.per_mode_[j].resize(static_cast<std::size_t>(problem.modes[j].size()));
    std::iota(c.per_mode_[j].begin(), c.per_mode_[j].end(), Index{0});
  }
  return c;
}

Index CandidateSet::total() const noexcept {
  Index n = 0;
  for (const auto& v : per_mode_) n += static_cast<Index>(v.size());
  return n;
}

bool CandidateSet::contains(std::size_t mode, Index idx) const {
  const auto& v = per_mode_.at(mode);
  return std::binary_search(v.begin(), v.end(), idx);
}

bool CandidateSet::insert(std::size_t mode, Index idx) {
  auto& v = per_mode_.at(mode);
  auto it = std::lower_bound(v.begin(), v.end(), idx);
  if (it != v.end() && *it == idx) return false;
  v.insert(it, idx);
  return true;
}

void CandidateSet::erase(std::size_t mode, Index idx) {
  auto& v = per_mode_.at(mode);
  auto it = std::lower_bound(v.begin(), v.end(), idx);
  if (it != v.end() && *it == idx) v.erase(it);
}

std::vector<std::pair<std::size_t, Index>> CandidateSet::pairs() const {
  std::vector<std::pair<std::size_t, Index>> out;
  for (std::size_t j = 0; j < per_mode_.size(); ++j)
    for (Index k : per_mode_[j]) out.emplace_back(j, k);
  return out;
}

const std::vector<VectorXd>* CutPool::find(std::size_t mode, Index idx) const {
  auto it = cuts_.find({mode, idx});
  return it == cuts_.end() ? nullptr : &it->second;
}

void CutPool::add(std::size_t mode, Index idx, const VectorXd& g) {
  auto& list = cuts_[{mode, idx}];
  for (const auto& old : list)
    if ((old - g).norm() <= 1e-12) return;
  list.push_back(g);
  ++count_;
}

namespace {

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Constraint piece of the restricted dual near the optimum: linear a^T lambda, or ||G^T lambda||.
struct Piece {
  std::size_t cand = 0;
  bool linear = true;
  VectorXd a;
  MatrixXd g;

  double value(const VectorXd& l) const { return linear ? a.dot(l) : (g.transpose() * l).norm(); }
  VectorXd grad(const VectorXd& l) const {
    if (linear) return a;
    const VectorXd v = g.transpose() * l;
    return g * v / v.norm();
  }
  MatrixXd hess(const VectorXd& l) const {
    const Index n = l.size();
    if (linear) return MatrixXd::Zero(n, n);
    const VectorXd v = g.transpose() * l;
    const double r = v.norm();
    const VectorXd vh = v / r;
    return g * (MatrixXd::Identity(v.size(), v.size()) - vh * vh.transpose()) * g.transpose() / r;
  }
};

// Pieces of candidate q whose value at lambda reaches `floor`. Empty when the cost has no closed form.
std::vector<Piece> pieces_at(std::size_t q, const SampledMode& mode, Index k, const VectorXd& lambda, double floor) {
  std::vector<Piece> out;
  const MatrixXd gam = mode.gamma(k);
  const VectorXd v = mode.gamma_transpose(k) * lambda;
  const auto& var = mode.cost.variant();
  if (std::holds_alternative<TwoNorm>(var)) {
    if (v.norm() >= floor) out.push_back({q, false, {}, gam});
  } else if (mode.cost.is_polyhedral()) {
    for (const auto& vert : mode.cost.vertices())
      if (vert.dot(v) >= floor) out.push_back({q, true, gam * vert, {}});
  } else if (const auto* mx = std::get_if<MixedAxis>(&var)) {
    const Index f = mx->fixed_axis;
    if (std::abs(v(f)) >= floor) out.push_back({q, true, gam.col(f) * (v(f) > 0.0 ? 1.0 : -1.0), {}});
    MatrixXd rest(gam.rows(), gam.cols() - 1);
    for (Index c = 0, r = 0; c < gam.cols(); ++c)
      if (c != f) rest.col(r++) = gam.col(c);
    if ((rest.transpose() * lambda).norm() >= floor) out.push_back({q, false, {}, rest});
  }
  return out;
}

// Newton on the KKT system  sum mu_i grad h_i = w,  h_i = 1  for a fixed piece set.
bool newton_kkt(const VectorXd& w, const std::vector<Piece>& pieces, VectorXd& lambda, VectorXd& mu) {
  const Index n = w.size();
  const Index m = static_cast<Index>(pieces.size());
  const double wn = w.norm();
  auto grads = [&](const VectorXd& l) {
    MatrixXd d(n, m);
    for (Index i = 0; i < m; ++i) d.col(i) = pieces[static_cast<std::size_t>(i)].grad(l);
    return d;
  };
  auto residual = [&](const VectorXd& l, const VectorXd& u) {
    VectorXd f(n + m);
    f.head(n) = (grads(l) * u - w) / wn;
    for (Index i = 0; i < m; ++i) f(n + i) = pieces[static_cast<std::size_t>(i)].value(l) - 1.0;
    return f;
  };
  for (int it = 0; it < 40; ++it) {
    const VectorXd f = residual(lambda, mu);
    if (f.cwiseAbs().maxCoeff() <= 1e-14) return true;
    MatrixXd jac = MatrixXd::Zero(n + m, n + m);
    const MatrixXd d = grads(lambda);
    for (Index i = 0; i < m; ++i) jac.topLeftCorner(n, n) += mu(i) * pieces[static_cast<std::size_t>(i)].hess(lambda);
    jac.topLeftCorner(n, n) /= wn;
    jac.topRightCorner(n, m) = d / wn;
    jac.bottomLeftCorner(m, n) = d.transpose();
    const VectorXd step = jac.completeOrthogonalDecomposition().solve(-f);
    const double f0 = f.norm();
    double t = 1.0;
    for (; t > 1e-4; t *= 0.5) {
      const VectorXd l2 = lambda + t * step.head(n);
      const VectorXd u2 = mu + t * step.tail(m);
      if (residual(l2, u2).norm() < f0) {
        lambda = l2;
        mu = u2;
        break;
      }
    }
    if (t <= 1e-4) return false;
  }
  return residual(lambda, mu).cwiseAbs().maxCoeff() <= 1e-13;
}

// Active-set search around `start`; returns lambda only when it is KKT-optimal for every candidate.
std::optional<VectorXd> polish(const VectorXd& w, const VectorXd& start, const std::vector<std::pair<std::size_t, Index>>& pairs,
                               const SampledProblem& problem, const std::function<VectorXd(const VectorXd&)>& candidate_profile) {
  const Index n = w.size();
  const VectorXd p0 = candidate_profile(start);
  for (double band : {1e-6, 1e-5, 1e-4, 1e-3}) {
    std::vector<Piece> pool;
    bool closed_form = true;
    for (std::size_t q = 0; q < pairs.size() && closed_form; ++q) {
      if (p0(static_cast<Index>(q)) < 1.0 - band) continue;
      auto more = pieces_at(q, problem.modes[pairs[q].first], pairs[q].second, start, 1.0 - band);
      closed_form = !more.empty();
      for (auto& pc : more) pool.push_back(std::move(pc));
    }
    if (!closed_form) return std::nullopt;
    if (pool.empty()) continue;

    auto grads_at = [&](const std::vector<Piece>& set, const VectorXd& l) {
      MatrixXd d(n, static_cast<Index>(set.size()));
      for (std::size_t i = 0; i < set.size(); ++i) d.col(static_cast<Index>(i)) = set[i].grad(l);
      return d;
    };
    const VectorXd mu0 = nnls(grads_at(pool, start), w).alpha;
    std::vector<std::pair<double, Piece>> ranked;
    for (std::size_t i = 0; i < pool.size(); ++i)
      if (mu0(static_cast<Index>(i)) > 0.0) ranked.emplace_back(mu0(static_cast<Index>(i)), pool[i]);
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

    // drop the weakest pieces one at a time until Newton lands on a KKT point
    for (std::size_t keep = ranked.size(); keep >= 1; --keep) {
      std::vector<Piece> set;
      for (std::size_t i = 0; i < keep; ++i) set.push_back(ranked[i].second);
      VectorXd lambda = start;
      VectorXd mu = nnls(grads_at(set, start), w).alpha;
      if (!newton_kkt(w, set, lambda, mu)) continue;
      if (mu.minCoeff() < -1e-12 * mu.cwiseAbs().maxCoeff()) continue;
      if (candidate_profile(lambda).maxCoeff() <= 1.0 + 1e-11) return lambda;
    }
  }
  return std::nullopt;
}

}  // namespace

DualSolution solve_restricted_dual(const VectorXd& w, const CandidateSet& cands, const SampledProblem& problem,
                                   const DualOptions& options, CutPool* pool) {
  if (w.size() != problem.state_dim) throw Error(ErrorKind::InvalidArgument, "restricted dual: w has the wrong dimension");
  if (!w.allFinite()) throw Error(ErrorKind::InvalidArgument, "restricted dual: w is not finite");
  if (w.norm() == 0.0) throw Error(ErrorKind::TrivialProblem, "trivial problem: w = 0 is reached without control");
  if (cands.modes() != problem.modes.size()) throw Error(ErrorKind::InvalidArgument, "restricted dual: candidate set shape mismatch");
  if (cands.total() == 0) throw Error(ErrorKind::InsufficientCandidates, "insufficient candidates: candidate set is empty");

  const auto pairs = cands.pairs();
  const VectorXd w_hat = w.normalized();

  std::vector<double> scales;
  for (const auto& [j, k] : pairs) {
    const auto& mode = problem.modes[j];
    const double h = support(mode.cost, mode.gamma_transpose(k) * w_hat);
    if (h > 0.0) scales.push_back(h);
  }
  if (scales.empty())
    throw Error(ErrorKind::InsufficientCandidates, "insufficient candidates: no candidate has an ascent direction along w");
  double box = 10.0 / median(scales);

  BoxedLp lp(w, box);
  DualSolution sol;
  std::vector<std::vector<VectorXd>> local(pairs.size());

  auto add_cut = [&](std::size_t p, const VectorXd& g) {
    for (const auto& old : local[p])
      if ((old - g).norm() <= 1e-12) return false;
    const auto [j, k] = pairs[p];
    const auto& mode = problem.modes[j];
    lp.add_row(mode.gamma_transpose(k).transpose() * g, 1.0);
    local[p].push_back(g);
    ++sol.cuts;
    if (pool && !mode.cost.is_polyhedral()) pool->add(j, k, g);
    return true;
  };

  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [j, k] = pairs[p];
    const auto& mode = problem.modes[j];
    if (mode.cost.is_polyhedral()) {
      for (const auto& g : mode.cost.vertices()) add_cut(p, g);
      continue;
    }
    const std::vector<VectorXd>* pooled = pool ? pool->find(j, k) : nullptr;
    if (pooled) {
      for (const auto& g : *pooled) add_cut(p, g);
    } else {
      const VectorXd v = mode.gamma_transpose(k) * w_hat;
      if (support(mode.cost, v) > 0.0)
        for (const auto& g : support_generators(mode.cost, v)) add_cut(p, g);
    }
  }

  const std::function<VectorXd(const VectorXd&)> candidate_profile = [&](const VectorXd& lambda) {
    VectorXd p(static_cast<Index>(pairs.size()));
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const auto [j, k] = pairs[q];
      const auto& mode = problem.modes[j];
      p(static_cast<Index>(q)) = support(mode.cost, mode.gamma_transpose(k) * lambda);
    }
    return p;
  };

  // most violated non-polyhedral candidates of p, largest first
  auto violated = [&](const VectorXd& p) {
    std::vector<std::size_t> out;
    for (std::size_t q = 0; q < pairs.size(); ++q)
      if (p(static_cast<Index>(q)) > 1.0 + options.feas_tol && !problem.modes[pairs[q].first].cost.is_polyhedral())
        out.push_back(q);
    std::sort(out.begin(), out.end(),
              [&](std::size_t a, std::size_t b) { return p(static_cast<Index>(a)) > p(static_cast<Index>(b)); });
    if (static_cast<int>(out.size()) > options.max_cuts_per_round)
      out.resize(static_cast<std::size_t>(options.max_cuts_per_round));
    return out;
  };

  VectorXd best = w_hat;
  VectorXd best_p = candidate_profile(best);
  double lower = w.dot(best) / best_p.maxCoeff();
  best /= best_p.maxCoeff();
  best_p /= best_p.maxCoeff();

  auto offer = [&](const VectorXd& lambda, const VectorXd& p) {
    const double m = p.maxCoeff();
    if (!(m > 0.0)) return;
    const double value = w.dot(lambda) / m;
    if (value > lower) {
      lower = value;
      best = lambda / m;
      best_p = p / m;
    }
  };

  int doublings = 0;
  double upper = std::numeric_limits<double>::infinity();
  double last_max = 0.0;
  while (true) {
    const LpStatus status = lp.solve();
    if (status != LpStatus::Optimal)
      throw Error(ErrorKind::Internal, status == LpStatus::Infeasible ? "restricted dual: LP reported infeasible cuts"
                                                                      : "restricted dual: LP pivot limit");
    const VectorXd x = lp.x();
    upper = lp.objective();
    const VectorXd px = candidate_profile(x);
    last_max = px.maxCoeff();
    offer(x, px);

    const bool binding = lp.box_dual() > 1e-10 * std::max(std::abs(upper), 1e-300);
    if (!binding && upper - lower <= options.gap_tol * std::abs(upper)) break;
    if (binding && last_max <= 1.0 + options.feas_tol) {
      if (doublings < options.max_box_doublings) {
        box *= 2.0;
        lp.set_box(box);
        ++doublings;
        continue;
      }
      if (options.allow_box_limited) {
        sol.box_limited = true;
        break;
      }
      throw Error(ErrorKind::DualUnbounded,
                  "dual unbounded: target likely unreachable with the given candidates (box doubled " +
                      std::to_string(doublings) + " times)");
    }

    // in-out query between the best feasible point and the LP vertex
    const VectorXd z = options.in_out * best + (1.0 - options.in_out) * x;
    const VectorXd pz = candidate_profile(z);
    offer(z, pz);

    bool added = false;
    for (std::size_t q : violated(px)) {
      const auto [j, k] = pairs[q];
      const auto& mode = problem.modes[j];
      for (const auto& g : support_generators(mode.cost, mode.gamma_transpose(k) * x)) added = add_cut(q, g) || added;
    }
    for (std::size_t q : violated(pz)) {
      const auto [j, k] = pairs[q];
      const auto& mode = problem.modes[j];
      for (const auto& g : support_generators(mode.cost, mode.gamma_transpose(k) * z)) added = add_cut(q, g) || added;
    }
    ++sol.rounds;
    if (!added) break;  // every cut already present; what is left is LP round-off
    if (sol.rounds > options.max_rounds) throw Error(ErrorKind::Internal, "restricted dual: cutting planes did not converge");
  }

  if (!sol.box_limited && options.polish) {
    if (auto polished = polish(w, best, pairs, problem, candidate_profile)) {
      const VectorXd p = candidate_profile(*polished);
      const double m = std::max(1.0, p.maxCoeff());
      if (w.dot(*polished) / m >= lower * (1.0 - 1e-9)) {
        best = *polished / m;
        best_p = p / m;
        lower = w.dot(best);
        sol.polished = true;
      }
    }
  }

  sol.candidate_max = last_max;
  sol.lambda = best;
  sol.objective = lower;
  sol.upper_bound = sol.box_limited ? std::numeric_limits<double>::infinity() : std::max(upper, lower);
  sol.lp_pivots = lp.pivots();
  if (!sol.box_limited && !(sol.objective > 0.0))
    throw Error(ErrorKind::InsufficientCandidates, "insufficient candidates: restricted dual optimum is not positive");
  for (std::size_t q = 0; q < pairs.size(); ++q)
    if (best_p(static_cast<Index>(q)) >= 1.0 - 1e-6) sol.active.push_back(pairs[q]);
  return sol;
}

VectorXd profile_values(const VectorXd& lambda, const SampledMode& mode) {
  const Index m = mode.input_dim();
  const Index k = mode.size();
  if (lambda.size() != mode.gamma_t.cols()) throw Error(ErrorKind::InvalidArgument, "profile: lambda has the wrong dimension");
  const VectorXd stacked = mode.gamma_t * lambda;
  const Eigen::Map<const MatrixXd> v(stacked.data(), m, k);
  const auto& var = mode.cost.variant();
  if (std::holds_alternative<TwoNorm>(var)) return v.colwise().norm().transpose();
  if (std::holds_alternative<OneNorm>(var)) return v.cwiseAbs().colwise().maxCoeff().transpose();
  if (const auto* t = std::get_if<PolyhedralThrusters>(&var))
    return (t->rows * v).colwise().maxCoeff().transpose().cwiseMax(0.0);
  VectorXd out(k);
  for (Index j = 0; j < k; ++j) out(j) = support(mode.cost, stacked.segment(j * m, m));
  return out;
}

std::vector<ProfileSample> profile(const VectorXd& lambda, const SampledMode& mode) {
  const VectorXd p = profile_values(lambda, mode);
  std::vector<ProfileSample> out(static_cast<std::size_t>(p.size()));
  for (Index j = 0; j < p.size(); ++j) out[static_cast<std::size_t>(j)] = {mode.times[static_cast<std::size_t>(j)], mode.id, p(j)};
  return out;
}

std::vector<VectorXd> profile_all(const VectorXd& lambda, const SampledProblem& problem) {
  std::vector<VectorXd> out;
  out.reserve(problem.modes.size());
  for (const auto& m : problem.modes) out.push_back(profile_values(lambda, m));
  return out;
}

double profile_max(const std::vector<VectorXd>& values) {
  double best = 0.0;
  for (const auto& v : values)
    if (v.size()) best = std::max(best, v.maxCoeff());
  return best;
}

std::vector<std::pair<std::size_t, Index>> local_maxima(const std::vector<VectorXd>& values, double threshold) {
  std::vector<std::pair<std::size_t, Index>> out;
  for (std::size_t j = 0; j < values.size(); ++j) {
    const VectorXd& p = values[j];
    const Index n = p.size();
    Index a = 0;
    while (a < n) {
      Index b = a;
      while (b + 1 < n && p(b + 1) == p(a)) ++b;
      const bool left = a == 0 || p(a - 1) < p(a);
      const bool right = b == n - 1 || p(b + 1) < p(b);
      if (left && right && p(a) > threshold) out.emplace_back(j, a);
      a = b + 1;
    }
  }
  return out;
}

}  // namespace impulse
