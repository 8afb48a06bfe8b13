#pragma once

#include "permrank/decomposition.hpp"
#include "permrank/matrix.hpp"
#include "permrank/permutation.hpp"

#include <span>
#include <vector>

namespace permrank {

struct ProjectionConfig {
  /// Frobenius change per sweep below which the solver stops.
  double tolerance = 1e-10;
  int max_iterations = 10000;
  double lower_bound = 0.0;
  double upper_bound = 1.0;

  void validate() const;
};

struct ProjectionResult {
  DenseMatrix matrix;
  int iterations = 0;
  /// Frobenius change of the last sweep.
  double residual = 0.0;
  bool converged = false;
};

/// Euclidean projection of `target` onto matrices that are bimonotone under
/// `perms` with entries in [lower_bound, upper_bound].
///
/// Dykstra's method over two sets: every row non-decreasing within the box,
/// and every column non-decreasing within the box (PAVA per chain, then a
/// clamp to the chain's monotone bound envelopes). The returned matrix is
/// exactly bimonotone and inside the box; it is within the solver tolerance of
/// the true projection when `converged`.
ProjectionResult project_bimonotone(const DenseMatrix& target, const PermutationPair& perms,
                                    const ProjectionConfig& cfg = {});

/// As project_bimonotone, with the upper bound replaced by the entrywise
/// `cap` (which must be >= lower_bound everywhere).
ProjectionResult project_bimonotone_below(const DenseMatrix& target, const PermutationPair& perms,
                                          const DenseMatrix& cap, const ProjectionConfig& cfg = {});

struct SumFit {
  PermRankDecomposition decomposition;
  DenseMatrix fitted;
  /// ||Y' - fitted||_F^2 after every sweep, non-increasing.
  std::vector<double> objective_trace;
  double objective = 0.0;
  int sweeps = 0;
  bool converged = false;
};

/// Least-squares fit of Y' by a sum of components, component l bimonotone
/// under perm_list[l], with the sum confined to [lower_bound, upper_bound].
///
/// Block-coordinate descent: each component is re-fit exactly against the
/// partial residual, capped so the running sum never leaves the box. The
/// objective is non-increasing; iteration stops when a sweep improves it by
/// less than cfg.tolerance.
SumFit fit_sum_of_bimonotone(const DenseMatrix& y_prime, std::span<const PermutationPair> perm_list,
                             const ProjectionConfig& cfg = {});

}  // namespace permrank
