#pragma once

#include "permrank/matrix.hpp"

#include <vector>

namespace permrank {

/// Thin SVD, singular values descending.
struct Svd {
  DenseMatrix u;
  Eigen::VectorXd s;
  DenseMatrix v;
};

Svd thin_svd(const DenseMatrix& a);
Eigen::VectorXd singular_values(const DenseMatrix& a);

/// Count of singular values above kRankThreshold * sigma_1.
int numerical_rank(const DenseMatrix& a, double rel_threshold = kRankThreshold);

struct PowerIterationConfig {
  double tolerance = 1e-8;
  int max_iterations = 5000;
  /// Matrices with both sides below this go straight to a full SVD.
  Index svd_cutoff = 64;
};

/// Largest singular value. Power iteration on A^T A for large inputs.
double operator_norm(const DenseMatrix& a, const PowerIterationConfig& cfg = {});

}  // namespace permrank
