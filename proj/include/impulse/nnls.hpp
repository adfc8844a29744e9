#pragma once

// Weighted nonnegative least squares: min (Y a - w)^T Q (Y a - w), a >= 0.

#include "impulse/types.hpp"

namespace impulse {

struct NnlsResult {
  VectorXd alpha;
  double objective = 0.0;     // (Y a - w)^T Q (Y a - w)
  double min_gradient = 0.0;  // min_i g_i, g = Y^T Q (Y a - w)
  double max_complementarity = 0.0;  // max_i |a_i g_i|
  int iterations = 0;
};

/// Lawson-Hanson active set on the Cholesky-transformed, column-normalized system.
/// Q defaults to identity when empty.
NnlsResult nnls(const MatrixXd& y, const VectorXd& w, const MatrixXd& q = MatrixXd(), int max_iterations = 0);

}  // namespace impulse
