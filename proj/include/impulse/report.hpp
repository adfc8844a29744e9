#pragma once

// Run reports (JSON) and plot data (CSV). Report values are in mm/s.

#include "impulse/planner.hpp"
#include "impulse/reference.hpp"

#include <string>
#include <vector>

namespace impulse {

struct ReportImpulse {
  double t_sec = 0.0;
  int mode = 0;
  std::vector<double> u_mms;  // RTN components for three-axis modes
  double cost_mms = 0.0;
  bool operator==(const ReportImpulse&) const = default;
};

struct ReportIteration {
  int iteration = 0;
  double objective_mms = 0.0;
  double max_profile = 0.0;
  Index candidates = 0;
  Index removed = 0;
  Index added = 0;
  bool operator==(const ReportIteration&) const = default;
};

struct RunReport {
  int schema_version = 1;
  std::string scenario;
  std::vector<ReportImpulse> impulses;
  double total_cost_mms = 0.0;
  double lower_bound_mms = 0.0;
  double gap = 1.0;
  int iterations = 0;
  double residual = 0.0;
  bool certificate_ok = true;
  std::vector<double> lambda;
  std::vector<ReportIteration> trace;
  std::vector<ProfileSample> profile;  // empty unless requested
  double solve_sec = 0.0;              // timing, excluded from comparisons

  bool same_results(const RunReport& o) const;
};

RunReport make_report(const std::string& scenario, const ManeuverPlan& plan, double solve_sec);
/// Profile of the plan's dual over every mode of the problem.
void attach_profile(RunReport& report, const ManeuverPlan& plan, const SampledProblem& problem);

std::string report_json(const RunReport& report);
RunReport parse_report(const std::string& text);

/// t_sec, mode, uR_mms, uT_mms, uN_mms, cost_mms
std::string maneuver_csv(const RunReport& report);
/// t_sec, mode, p
std::string profile_csv(const std::vector<ProfileSample>& samples);

/// Timing table of the three solvers.
std::string compare_json(const CompareReport& report);

/// Iteration trace of a failed run, one line per iteration.
std::string trace_text(const std::vector<IterationRecord>& trace);

}  // namespace impulse
