#include "impulse/nnls.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include <cmath>
#include <limits>
#include <vector>

namespace impulse {

namespace {

VectorXd solve_passive(const MatrixXd& a, const VectorXd& b, const std::vector<Index>& passive) {
  MatrixXd sub(a.rows(), static_cast<Index>(passive.size()));
  for (std::size_t j = 0; j < passive.size(); ++j) sub.col(static_cast<Index>(j)) = a.col(passive[j]);
  return sub.colPivHouseholderQr().solve(b);
}

}  // namespace

NnlsResult nnls(const MatrixXd& y, const VectorXd& w, const MatrixXd& q, int max_iterations) {
  const Index n = y.rows();
  const Index k = y.cols();
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "nnls: no columns");
  if (w.size() != n) throw Error(ErrorKind::InvalidArgument, "nnls: w has the wrong dimension");
  if (!y.allFinite() || !w.allFinite()) throw Error(ErrorKind::InvalidArgument, "nnls: non-finite input");

  MatrixXd weight = q.size() ? q : MatrixXd::Identity(n, n);
  if (weight.rows() != n || weight.cols() != n) throw Error(ErrorKind::InvalidArgument, "nnls: Q has the wrong shape");
  if (!weight.isApprox(weight.transpose(), 1e-12)) throw Error(ErrorKind::InvalidArgument, "nnls: Q must be symmetric");
  Eigen::LLT<MatrixXd> llt(weight);
  if (llt.info() != Eigen::Success) throw Error(ErrorKind::InvalidArgument, "nnls: Q must be positive definite");

  // Q = L L^T, so (Ya - w)^T Q (Ya - w) = ||L^T (Ya - w)||^2
  const MatrixXd lt = llt.matrixU();
  MatrixXd a = lt * y;
  const VectorXd b = lt * w;
  VectorXd scale = a.colwise().norm().transpose();
  for (Index j = 0; j < k; ++j) {
    if (scale(j) > 0.0) a.col(j) /= scale(j);
  }

  const double tol = 1e3 * std::numeric_limits<double>::epsilon() * std::max(1.0, b.norm()) * static_cast<double>(k);
  const int cap = max_iterations > 0 ? max_iterations : static_cast<int>(3 * k + 30);

  VectorXd x = VectorXd::Zero(k);
  std::vector<char> in_passive(static_cast<std::size_t>(k), 0);
  std::vector<Index> passive;
  int iterations = 0;

  while (true) {
    const VectorXd grad = a.transpose() * (b - a * x);  // negative gradient
    Index enter = -1;
    double best = tol;
    for (Index j = 0; j < k; ++j) {
      if (in_passive[static_cast<std::size_t>(j)] || scale(j) == 0.0) continue;
      if (grad(j) > best) {
        best = grad(j);
        enter = j;
      }
    }
    if (enter < 0) break;
    if (++iterations > cap) throw Error(ErrorKind::IterationLimit, "nnls: iteration cap reached");
    in_passive[static_cast<std::size_t>(enter)] = 1;
    passive.push_back(enter);

    while (true) {
      const VectorXd z = solve_passive(a, b, passive);
      bool all_positive = true;
      for (Index i = 0; i < z.size(); ++i) all_positive = all_positive && z(i) > 0.0;
      if (all_positive) {
        for (std::size_t i = 0; i < passive.size(); ++i) x(passive[i]) = z(static_cast<Index>(i));
        break;
      }
      double step = 1.0;
      for (std::size_t i = 0; i < passive.size(); ++i) {
        const double zi = z(static_cast<Index>(i));
        if (zi <= 0.0) {
          const double xi = x(passive[i]);
          step = std::min(step, xi / (xi - zi));
        }
      }
      for (std::size_t i = 0; i < passive.size(); ++i) {
        const Index j = passive[i];
        x(j) += step * (z(static_cast<Index>(i)) - x(j));
      }
      std::vector<Index> keep;
      for (Index j : passive) {
        if (x(j) > tol * 1e-3) {
          keep.push_back(j);
        } else {
          x(j) = 0.0;
          in_passive[static_cast<std::size_t>(j)] = 0;
        }
      }
      passive.swap(keep);
      if (passive.empty()) break;
      if (++iterations > cap) throw Error(ErrorKind::IterationLimit, "nnls: iteration cap reached");
    }
  }

  NnlsResult out;
  out.alpha = VectorXd::Zero(k);
  for (Index j = 0; j < k; ++j)
    if (scale(j) > 0.0) out.alpha(j) = x(j) / scale(j);
  const VectorXd r = y * out.alpha - w;
  out.objective = r.dot(weight * r);
  const VectorXd g = y.transpose() * (weight * r);
  out.min_gradient = g.minCoeff();
  out.max_complementarity = (out.alpha.array() * g.array()).abs().maxCoeff();
  out.iterations = iterations;
  return out;
}

}  // namespace impulse
