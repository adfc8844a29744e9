#pragma once

// Dense revised simplex for small-row LPs.
//
// BoxedLp solves   maximize c^T x   s.t.  a_i^T x <= b_i,  -R <= x_k <= R
// through its dual standard form
//   minimize b^T y + R 1^T (s+ + s-)   s.t.  A^T y + s+ - s- = c,   y, s >= 0.
// The simplex multipliers of the standard form are x; the y are the row duals.
// Rows become columns, so appending cuts keeps the current basis feasible.

#include "impulse/types.hpp"

#include <Eigen/LU>

#include <vector>

namespace impulse {

struct LpOptions {
  int max_pivots = 200000;
  int degenerate_switch = 100;  // consecutive degenerate pivots before Bland's rule
  double optimality_tol = 1e-12;
  double pivot_tol = 1e-11;
};

enum class LpStatus { Optimal, Infeasible, PivotLimit };

class BoxedLp {
 public:
  BoxedLp(VectorXd objective, double box, LpOptions options = {});

  Index dim() const noexcept { return c_.size(); }
  Index rows() const noexcept { return static_cast<Index>(rhs_.size()); }
  double box() const noexcept { return box_; }

  /// Appends a_i^T x <= b_i; returns the row index.
  Index add_row(const Eigen::Ref<const VectorXd>& a, double b);
  /// Changes R; the current basis stays feasible.
  void set_box(double box);

  LpStatus solve();

  const VectorXd& x() const noexcept { return x_; }
  /// Row duals y (size rows()).
  VectorXd row_duals() const;
  double objective() const noexcept { return c_.dot(x_); }
  /// Dual standard-form objective b^T y + R sum(s).
  double dual_objective() const;
  /// True when some |x_k| reaches R (relative 1e-9).
  bool box_active() const;
  /// R * sum(s+ + s-): the share of the dual objective paid by the box. Zero means the
  /// row duals alone certify the bound, so it holds without the box.
  double box_dual() const;
  /// max_i y_i * (b_i - a_i^T x) and max_k s_k * (R -+ x_k); zero at an exact optimum.
  double complementarity_residual() const;
  /// max_i (a_i^T x - b_i), clamped below at 0.
  double max_row_violation() const;
  int pivots() const noexcept { return pivots_; }

  Eigen::Map<const MatrixXd> row_matrix() const {
    return Eigen::Map<const MatrixXd>(cols_.data(), dim(), rows());
  }

 private:
  Index total_columns() const noexcept { return rows() + 2 * dim(); }
  VectorXd column(Index j) const;
  double column_cost(Index j) const;
  void refactor();

  VectorXd c_;
  double box_;
  LpOptions opt_;
  std::vector<double> cols_;  // column-major dim x rows
  std::vector<double> rhs_;
  std::vector<Index> basis_;  // size dim; s+_k = k, s-_k = dim+k, row i = 2 dim + i
  VectorXd xb_;
  VectorXd x_;
  Eigen::PartialPivLU<MatrixXd> lu_;
  int pivots_ = 0;
};

struct LpRow {
  VectorXd a;
  double b = 0.0;
};

struct LpResult {
  LpStatus status = LpStatus::Optimal;
  VectorXd x;
  VectorXd row_duals;
  double objective = 0.0;
  double dual_objective = 0.0;
  double complementarity = 0.0;
  bool box_active = false;
  int pivots = 0;
};

/// One-shot boxed LP: maximize c^T x s.t. rows, |x_k| <= box.
LpResult lp_solve(const VectorXd& c, const std::vector<LpRow>& rows, double box, const LpOptions& options = {});

}  // namespace impulse
