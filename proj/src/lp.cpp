#include "impulse/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace impulse {

// Column ids: 0..n-1 are s+_k, n..2n-1 are s-_k, 2n + i is row i.

BoxedLp::BoxedLp(VectorXd objective, double box, LpOptions options)
    : c_(std::move(objective)), box_(box), opt_(options) {
  if (c_.size() < 1) throw Error(ErrorKind::InvalidArgument, "lp: empty objective");
  if (!c_.allFinite()) throw Error(ErrorKind::InvalidArgument, "lp: non-finite objective");
  if (!(box > 0.0) || !std::isfinite(box)) throw Error(ErrorKind::InvalidArgument, "lp: box must be positive");
  const Index n = c_.size();
  basis_.resize(static_cast<std::size_t>(n));
  for (Index k = 0; k < n; ++k) basis_[static_cast<std::size_t>(k)] = c_(k) >= 0.0 ? k : n + k;
  x_ = VectorXd::Zero(n);
  refactor();
}

Index BoxedLp::add_row(const Eigen::Ref<const VectorXd>& a, double b) {
  if (a.size() != dim()) throw Error(ErrorKind::InvalidArgument, "lp: row dimension mismatch");
  if (!a.allFinite() || !std::isfinite(b)) throw Error(ErrorKind::InvalidArgument, "lp: non-finite row");
  cols_.insert(cols_.end(), a.data(), a.data() + a.size());
  rhs_.push_back(b);
  return rows() - 1;
}

void BoxedLp::set_box(double box) {
  if (!(box > 0.0) || !std::isfinite(box)) throw Error(ErrorKind::InvalidArgument, "lp: box must be positive");
  box_ = box;
}

VectorXd BoxedLp::column(Index j) const {
  const Index n = dim();
  if (j < n) return VectorXd::Unit(n, j);
  if (j < 2 * n) return -VectorXd::Unit(n, j - n);
  return Eigen::Map<const VectorXd>(cols_.data() + (j - 2 * n) * n, n);
}

double BoxedLp::column_cost(Index j) const {
  return j < 2 * dim() ? box_ : rhs_[static_cast<std::size_t>(j - 2 * dim())];
}

void BoxedLp::refactor() {
  const Index n = dim();
  MatrixXd bmat(n, n);
  VectorXd cb(n);
  for (Index i = 0; i < n; ++i) {
    const Index j = basis_[static_cast<std::size_t>(i)];
    bmat.col(i) = column(j);
    cb(i) = column_cost(j);
  }
  lu_.compute(bmat);
  xb_ = lu_.solve(c_);
  x_ = lu_.transpose().solve(cb);
}

LpStatus BoxedLp::solve() {
  const Index n = dim();
  int degenerate_run = 0;
  std::vector<char> is_basic;
  while (true) {
    refactor();
    if (pivots_ >= opt_.max_pivots) return LpStatus::PivotLimit;
    const bool bland = degenerate_run >= opt_.degenerate_switch;

    is_basic.assign(static_cast<std::size_t>(total_columns()), 0);
    for (Index j : basis_) is_basic[static_cast<std::size_t>(j)] = 1;

    // pricing
    Index enter = -1;
    double best = 0.0;
    auto consider = [&](Index j, double d, double scale) {
      if (is_basic[static_cast<std::size_t>(j)]) return false;
      if (d >= -opt_.optimality_tol * scale) return false;
      if (bland) {
        if (enter < 0) {
          enter = j;
          best = d;
        }
        return true;
      }
      if (enter < 0 || d / scale < best) {
        enter = j;
        best = d / scale;
      }
      return false;
    };
    bool stop = false;
    for (Index k = 0; k < n && !stop; ++k) stop = consider(k, box_ - x_(k), std::max(1.0, box_));
    for (Index k = 0; k < n && !stop; ++k) stop = consider(n + k, box_ + x_(k), std::max(1.0, box_));
    if (!stop && rows() > 0) {
      const VectorXd ax = row_matrix().transpose() * x_;
      for (Index i = 0; i < rows() && !stop; ++i) {
        const double b = rhs_[static_cast<std::size_t>(i)];
        stop = consider(2 * n + i, b - ax(i), std::max({1.0, std::abs(b), std::abs(ax(i))}));
      }
    }
    if (enter < 0) return LpStatus::Optimal;

    // ratio test
    const VectorXd delta = lu_.solve(column(enter));
    const double dmax = delta.cwiseAbs().maxCoeff();
    Index leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < n; ++i) {
      const double di = delta(i);
      if (di <= opt_.pivot_tol * dmax) continue;
      const double r = std::max(xb_(i), 0.0) / di;
      const double tie = 1e-12 * std::max(1.0, ratio);
      if (leave < 0 || r < ratio - tie) {
        leave = i;
        ratio = r;
      } else if (r <= ratio + tie) {
        const bool better = bland ? basis_[static_cast<std::size_t>(i)] < basis_[static_cast<std::size_t>(leave)]
                                  : di > delta(leave);
        if (better) {
          leave = i;
          ratio = std::min(ratio, r);
        }
      }
    }
    if (leave < 0) return LpStatus::Infeasible;

    degenerate_run = ratio <= 1e-14 * std::max(1.0, xb_.cwiseAbs().maxCoeff()) ? degenerate_run + 1 : 0;
    basis_[static_cast<std::size_t>(leave)] = enter;
    ++pivots_;
  }
}

VectorXd BoxedLp::row_duals() const {
  VectorXd y = VectorXd::Zero(rows());
  const Index n = dim();
  for (Index i = 0; i < n; ++i) {
    const Index j = basis_[static_cast<std::size_t>(i)];
    if (j >= 2 * n) y(j - 2 * n) = std::max(xb_(i), 0.0);
  }
  return y;
}

double BoxedLp::dual_objective() const {
  double total = 0.0;
  for (Index i = 0; i < dim(); ++i) total += column_cost(basis_[static_cast<std::size_t>(i)]) * std::max(xb_(i), 0.0);
  return total;
}

double BoxedLp::box_dual() const {
  double total = 0.0;
  for (Index i = 0; i < dim(); ++i)
    if (basis_[static_cast<std::size_t>(i)] < 2 * dim()) total += std::max(xb_(i), 0.0);
  return box_ * total;
}

bool BoxedLp::box_active() const { return x_.cwiseAbs().maxCoeff() >= box_ * (1.0 - 1e-9); }

double BoxedLp::complementarity_residual() const {
  const Index n = dim();
  double worst = 0.0;
  for (Index i = 0; i < n; ++i) {
    const Index j = basis_[static_cast<std::size_t>(i)];
    const double value = std::max(xb_(i), 0.0);
    double slack = 0.0;
    if (j < n) {
      slack = box_ - x_(j);
    } else if (j < 2 * n) {
      slack = box_ + x_(j - n);
    } else {
      const Index r = j - 2 * n;
      slack = rhs_[static_cast<std::size_t>(r)] - row_matrix().col(r).dot(x_);
    }
    worst = std::max(worst, std::abs(value * slack));
  }
  return worst;
}

double BoxedLp::max_row_violation() const {
  if (rows() == 0) return 0.0;
  const VectorXd ax = row_matrix().transpose() * x_;
  double worst = 0.0;
  for (Index i = 0; i < rows(); ++i) worst = std::max(worst, ax(i) - rhs_[static_cast<std::size_t>(i)]);
  return worst;
}

LpResult lp_solve(const VectorXd& c, const std::vector<LpRow>& rows, double box, const LpOptions& options) {
  BoxedLp lp(c, box, options);
  for (const auto& r : rows) lp.add_row(r.a, r.b);
  LpResult out;
  out.status = lp.solve();
  if (out.status == LpStatus::Infeasible) throw Error(ErrorKind::Internal, "lp_solve: infeasible constraint set");
  if (out.status == LpStatus::PivotLimit) throw Error(ErrorKind::Internal, "lp_solve: pivot limit reached");
  out.x = lp.x();
  out.row_duals = lp.row_duals();
  out.objective = lp.objective();
  out.dual_objective = lp.dual_objective();
  out.complementarity = lp.complementarity_residual();
  out.box_active = lp.box_active();
  out.pivots = lp.pivots();
  return out;
}

}  // namespace impulse
