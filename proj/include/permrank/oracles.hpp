#pragma once

// Reference solvers used to check the library. They share only the matrix and
// permutation types with the code under test; none of them call into the
// projection or membership routines.

#include "permrank/matrix.hpp"
#include "permrank/permutation.hpp"

#include <span>

namespace permrank::oracle {

/// Membership in PR(1) by trying every (row, column) permutation pair.
bool pr1_by_enumeration(const DenseMatrix& m, double tol = kBimonotoneTolerance);

struct QpResult {
  Eigen::VectorXd x;
  int iterations = 0;
  bool converged = false;
};

/// Primal active-set method for min 1/2 x'Gx + c'x subject to A x >= b,
/// G positive definite, started from a feasible x0.
QpResult solve_qp_active_set(const DenseMatrix& g, const Eigen::VectorXd& c, const DenseMatrix& a,
                             const Eigen::VectorXd& b, Eigen::VectorXd x0, int max_iterations = 2000);

/// Projection onto {bimonotone under perms} with entrywise bounds lo <= X <= hi,
/// posed as a dense QP. Requires lo to be a constant matrix (feasible start).
DenseMatrix qp_project_bimonotone(const DenseMatrix& target, const PermutationPair& perms, const DenseMatrix& lo,
                                  const DenseMatrix& hi);

/// min ||Y - sum_l X_l||_F^2 with X_l >= 0 bimonotone under perms[l] and the
/// sum <= 1, posed as one dense QP with a tiny ridge (1e-10) for definiteness.
/// Returns the unregularized objective at the solution.
double qp_fit_sum_objective(const DenseMatrix& y, std::span<const PermutationPair> perms);

struct GridResult {
  DenseMatrix argmin;
  double objective = 0.0;
};

/// Exhaustive search over 2x2 matrices with entries on the grid {0, step, 2 step, ...}
/// that are bimonotone under perms and satisfy 0 <= X <= cap.
GridResult grid_project_below_2x2(const DenseMatrix& target, const PermutationPair& perms, const DenseMatrix& cap,
                                  double step);

}  // namespace permrank::oracle
