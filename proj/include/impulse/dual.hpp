#pragma once

// Sampled problem data, the restricted dual over candidate times, and support profiles.

#include "impulse/cost_model.hpp"
#include "impulse/schedule.hpp"

#include <functional>
#include <map>
#include <utility>
#include <vector>

namespace impulse {

/// Gamma(t): n x m map from an impulse at t to the final pseudostate.
using GammaProvider = std::function<MatrixXd(double t)>;

/// A control mode with Gamma tabulated on its admissible times.
struct SampledMode {
  int id = 0;
  CostModel cost = CostModel::two_norm();
  std::vector<double> times;
  MatrixXd gamma_t;  // (m * k) x n, rows [m*j, m*j+m) hold Gamma(t_j)^T

  Index size() const noexcept { return static_cast<Index>(times.size()); }
  Index input_dim() const noexcept { return cost.input_dim(); }
  auto gamma_transpose(Index j) const { return gamma_t.middleRows(j * input_dim(), input_dim()); }
  MatrixXd gamma(Index j) const { return gamma_transpose(j).transpose(); }
};

struct SampledProblem {
  std::vector<SampledMode> modes;
  Index state_dim = 6;
  double t_i = 0.0;
  double t_f = 0.0;

  Index total_times() const;
  const SampledMode& mode(std::size_t j) const { return modes[j]; }
};

/// Tabulates Gamma for every admissible time of every mode.
SampledProblem sample_problem(const ModeSchedule& schedule, const GammaProvider& gamma);

/// Per-mode sorted indices into the mode's admissible times.
class CandidateSet {
 public:
  CandidateSet() = default;
  explicit CandidateSet(std::size_t modes) : per_mode_(modes) {}

  static CandidateSet all(const SampledProblem& problem);

  std::size_t modes() const noexcept { return per_mode_.size(); }
  const std::vector<Index>& operator[](std::size_t j) const { return per_mode_[j]; }
  Index total() const noexcept;
  bool contains(std::size_t mode, Index idx) const;
  /// Returns true when newly inserted.
  bool insert(std::size_t mode, Index idx);
  void erase(std::size_t mode, Index idx);
  std::vector<std::pair<std::size_t, Index>> pairs() const;
  bool operator==(const CandidateSet& other) const { return per_mode_ == other.per_mode_; }

 private:
  std::vector<std::vector<Index>> per_mode_;
};

struct DualOptions {
  double feas_tol = 1e-9;
  double gap_tol = 1e-10;  // relative gap between the LP bound and the best feasible lambda
  double in_out = 0.5;     // weight of the best feasible point in the cut query
  int max_rounds = 2000;
  int max_box_doublings = 30;
  bool allow_box_limited = false;  // return the box-limited iterate instead of throwing
  int max_cuts_per_round = 64;
  bool polish = true;  // Newton on the active-set KKT system after the cutting planes
};

struct DualSolution {
  VectorXd lambda;          // feasible on the candidates [1/s]
  double objective = 0.0;   // lambda^T w [m/s]
  double upper_bound = 0.0; // LP relaxation objective, >= restricted optimum
  double candidate_max = 0.0;  // max candidate profile at the last LP vertex
  std::vector<std::pair<std::size_t, Index>> active;  // candidates with p >= 1 - 1e-6
  Index cuts = 0;
  int rounds = 0;
  int lp_pivots = 0;
  bool box_limited = false;
  bool polished = false;
};

/// Cutting-plane directions kept between restricted solves, keyed by (mode, time index).
class CutPool {
 public:
  const std::vector<VectorXd>* find(std::size_t mode, Index idx) const;
  void add(std::size_t mode, Index idx, const VectorXd& g);
  std::size_t size() const noexcept { return count_; }

 private:
  std::map<std::pair<std::size_t, Index>, std::vector<VectorXd>> cuts_;
  std::size_t count_ = 0;
};

/// maximize lambda^T w s.t. support_j(Gamma(t)^T lambda) <= 1 on every candidate.
DualSolution solve_restricted_dual(const VectorXd& w, const CandidateSet& cands, const SampledProblem& problem,
                                   const DualOptions& options = {}, CutPool* pool = nullptr);

struct ProfileSample {
  double t = 0.0;
  int mode_id = 0;
  double p = 0.0;

  bool operator==(const ProfileSample&) const = default;
};

/// p_j(t) = support(Gamma(t)^T lambda) for every admissible time of one mode.
VectorXd profile_values(const VectorXd& lambda, const SampledMode& mode);
std::vector<ProfileSample> profile(const VectorXd& lambda, const SampledMode& mode);
/// Profiles of all modes.
std::vector<VectorXd> profile_all(const VectorXd& lambda, const SampledProblem& problem);
double profile_max(const std::vector<VectorXd>& values);

/// Indices (mode, time index) of local maxima above threshold; plateaus report their first index.
std::vector<std::pair<std::size_t, Index>> local_maxima(const std::vector<VectorXd>& values, double threshold);

}  // namespace impulse
