#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <vector>

namespace impulse {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

using Vector3 = Eigen::Vector3d;
using Vector6 = Eigen::Matrix<double, 6, 1>;
using Matrix6 = Eigen::Matrix<double, 6, 6>;
using Matrix63 = Eigen::Matrix<double, 6, 3>;

enum class ErrorKind {
  InvalidArgument,
  NoAscentDirection,
  TrivialProblem,
  InsufficientCandidates,
  DualUnbounded,
  IterationLimit,
  ExtractionFailed,
  Unreachable,
  Parse,
  Internal,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// One pass of the candidate refinement loop.
struct IterationRecord {
  int iteration = 0;
  double objective = 0.0;    // restricted dual objective [cost units]
  double max_profile = 0.0;  // full-grid max of the support profile
  Index candidates = 0;
  Index removed = 0;
  Index added = 0;
};

/// Planner failure carrying the refinement trace and the best bounds seen.
class PlanningError : public Error {
 public:
  PlanningError(ErrorKind kind, const std::string& what, std::vector<IterationRecord> trace,
                double best_upper = 0.0, double best_lower = 0.0)
      : Error(kind, what), trace_(std::move(trace)), best_upper_(best_upper), best_lower_(best_lower) {}

  const std::vector<IterationRecord>& trace() const noexcept { return trace_; }
  double best_upper() const noexcept { return best_upper_; }
  double best_lower() const noexcept { return best_lower_; }

 private:
  std::vector<IterationRecord> trace_;
  double best_upper_;
  double best_lower_;
};

}  // namespace impulse
