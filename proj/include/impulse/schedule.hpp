#pragma once

// Control modes and the decomposition of a piecewise cost into modes.

#include "impulse/cost_model.hpp"

#include <string>
#include <vector>

namespace impulse {

struct ControlMode {
  int id = 0;
  CostModel cost = CostModel::two_norm();
  std::vector<double> times;  // strictly increasing [s]
};

using ModeSchedule = std::vector<ControlMode>;

struct TimeInterval {
  double lo = 0.0;
  double hi = 0.0;
  bool lo_closed = true;
  bool hi_closed = true;

  bool contains(double t) const noexcept {
    const bool above = lo_closed ? t >= lo : t > lo;
    const bool below = hi_closed ? t <= hi : t < hi;
    return above && below;
  }
};

struct CostPiece {
  TimeInterval interval;
  CostModel cost = CostModel::two_norm();
  int mode_id = 0;  // pieces sharing an id form one mode
};

/// Assign every grid time to the mode(s) of the piece(s) containing it.
/// A time shared by two closed endpoints stays with the earlier piece and is also given to
/// the later one when validate_boundary(earlier, earlier, later) is ok.
ModeSchedule decompose_schedule(const std::vector<CostPiece>& pieces, const std::vector<double>& grid);

enum class BoundaryStatus { Ok, Violation, Unavailable };

struct BoundaryReport {
  BoundaryStatus status = BoundaryStatus::Ok;
  std::string detail;
  bool ok() const noexcept { return status == BoundaryStatus::Ok; }
};

/// Checks hull(C_left u C_right) in C_mid and hull(U_left(1) u U_right(1)) in U_mid(1).
BoundaryReport validate_boundary(const CostModel& left, const CostModel& mid, const CostModel& right);

/// Sanity checks on a schedule: nonempty sorted times, unique ids, matching dimensions.
void validate_schedule(const ModeSchedule& schedule);

}  // namespace impulse
