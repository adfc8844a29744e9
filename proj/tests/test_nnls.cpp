#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "impulse/nnls.hpp"

#include <Eigen/Dense>

#include <random>

using namespace impulse;

namespace {

// Every support pattern: least squares on the pattern, kept when nonnegative.
double brute_force(const MatrixXd& y, const VectorXd& w, const MatrixXd& q) {
  const Index k = y.cols();
  const MatrixXd lt = q.llt().matrixU();
  const MatrixXd a = lt * y;
  const VectorXd b = lt * w;
  double best = b.squaredNorm();
  for (unsigned mask = 1; mask < (1u << k); ++mask) {
    std::vector<Index> cols;
    for (Index j = 0; j < k; ++j)
      if (mask & (1u << j)) cols.push_back(j);
    MatrixXd sub(a.rows(), static_cast<Index>(cols.size()));
    for (std::size_t j = 0; j < cols.size(); ++j) sub.col(static_cast<Index>(j)) = a.col(cols[j]);
    const VectorXd z = sub.completeOrthogonalDecomposition().solve(b);
    if (z.minCoeff() < 0.0) continue;
    best = std::min(best, (sub * z - b).squaredNorm());
  }
  return best;
}

MatrixXd random_spd(std::mt19937_64& rng, Index n) {
  std::normal_distribution<double> g;
  const MatrixXd m = MatrixXd::NullaryExpr(n, n, [&] { return g(rng); });
  return m * m.transpose() + 0.5 * MatrixXd::Identity(n, n);
}

}  // namespace

TEST_CASE("identity columns return w") {
  VectorXd w(6);
  w << 1, 0, 2.5, 3, 0.25, 7;
  const auto r = nnls(MatrixXd::Identity(6, 6), w);
  CHECK((r.alpha - w).norm() <= 1e-12);
  CHECK(r.objective <= 1e-20);
}

TEST_CASE("opposite single column gives zero") {
  VectorXd y(6);
  y << 1, -2, 3, 0.5, 0, 1;
  const auto r = nnls(y, -y);
  CHECK(r.alpha(0) == 0.0);
  CHECK(r.objective == doctest::Approx(y.squaredNorm()));
}

TEST_CASE("two columns in closed form") {
  MatrixXd y(2, 2);
  y << 2, 1, 0, 1;
  const VectorXd w = Eigen::Vector2d(3, 2);
  // w = a (2,0) + b (1,1) -> b = 2, a = 0.5
  const auto r = nnls(y, w);
  CHECK(r.alpha(0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.alpha(1) == doctest::Approx(2.0).epsilon(1e-12));
  // outside the cone: projection onto the nearer ray (1,1)
  const auto r2 = nnls(y, Eigen::Vector2d(-1, 3));
  CHECK(r2.alpha(0) == 0.0);
  CHECK(r2.alpha(1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("random problems match the exhaustive active-set oracle with KKT certificates") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 300; ++trial) {
    const Index k = 1 + trial % 6;
    const Index n = trial % 3 == 0 ? 6 : 2 + trial % 5;
    MatrixXd y = MatrixXd::NullaryExpr(n, k, [&] { return g(rng); });
    if (trial % 7 == 0 && k > 1) y.col(k - 1) = 2.0 * y.col(0);  // duplicated direction
    const VectorXd w = VectorXd::NullaryExpr(n, [&] { return g(rng); });
    const MatrixXd q = trial % 2 ? random_spd(rng, n) : MatrixXd::Identity(n, n);
    const auto r = nnls(y, w, q);
    CAPTURE(trial);
    CHECK(r.alpha.minCoeff() >= 0.0);
    CHECK(r.objective == doctest::Approx(brute_force(y, w, q)).epsilon(1e-9).scale(1e-12));
    CHECK(r.min_gradient >= -1e-10);
    CHECK(r.max_complementarity <= 1e-10);
  }
}

TEST_CASE("nnls argument errors") {
  const MatrixXd y = MatrixXd::Identity(3, 3);
  const VectorXd w = VectorXd::Ones(3);
  MatrixXd bad = MatrixXd::Identity(3, 3);
  bad(0, 1) = 0.5;
  CHECK_THROWS_AS(nnls(y, w, bad), Error);
  CHECK_THROWS_AS(nnls(y, w, -MatrixXd::Identity(3, 3)), Error);
  CHECK_THROWS_AS(nnls(y, VectorXd::Ones(4)), Error);
  CHECK_THROWS_AS(nnls(MatrixXd(3, 0), w), Error);
}
