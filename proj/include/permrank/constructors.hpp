#pragma once

#include "permrank/matrix.hpp"

#include <array>
#include <cstdint>
#include <utility>

namespace permrank {

/// k x k matrix with ones on and above the diagonal.
UnitIntervalMatrix make_upper_triangular_ones(Index k);

/// n x d block matrix diag(J_{r-rho+1}, I_{rho-1}, 0): permutation-rank rho,
/// non-negative rank r. Requires 1 <= rho <= r <= min(n, d).
UnitIntervalMatrix make_rank_pair_matrix(Index rho, Index r, Index n, Index d);

/// n x n matrix: 1 below the diagonal, 1/2 on it, 0 above.
UnitIntervalMatrix make_triangular_halves(Index n);

struct HausdorffBlock {
  UnitIntervalMatrix matrix;
  Index k = 0;
  /// Rows and columns covered by the k blocks; the rest is zero padding.
  Index effective_rows = 0;
  Index effective_cols = 0;
  /// One block, [[1,1],[1,0]] scaled up to quadrants.
  DenseMatrix block;
};

/// Block-diagonal matrix with k copies of the quadrant block [[1,1],[1,0]].
/// Block sizes are floored to even numbers; leftover rows/columns are zero.
HausdorffBlock make_hausdorff_block(Index k, Index n, Index d);

/// Indicators of the top-left and bottom-right quadrants. Both have
/// permutation-rank one; their midpoint is far from that set.
std::pair<UnitIntervalMatrix, UnitIntervalMatrix> make_convexity_witness_pair(Index n, Index d);

/// Per-user convex combination of r non-negative rank-one matrices u v^T with
/// u, v uniform on [0,1]. The result has non-negative rank at most r.
UnitIntervalMatrix generate_convex_combination_model(Index n, Index d, Index r, std::uint64_t seed);

struct TwoStepCounterexample {
  UnitIntervalMatrix m_star;
  UnitIntervalMatrix first;   ///< a1 b1^T + a2 b2^T
  UnitIntervalMatrix second;  ///< a3 b3^T
  DenseMatrix left;           ///< n x 3, columns a1, a2, a3
  DenseMatrix right;          ///< d x 3, columns b1, b2, b3
  /// Sizes of the three groups after the leading entry, for rows and columns.
  std::array<Index, 3> row_groups{};
  std::array<Index, 3> col_groups{};
};

/// Sum of two bimonotone matrices whose top two singular vectors order the
/// groups inconsistently with the truth. Group shares are .684, .304, .012 of
/// n - 1 (and d - 1); the smallest group gets at least one entry.
TwoStepCounterexample make_two_step_counterexample(Index n, Index d);

/// [[0,.6],[.6,.4]] in the top-left corner, ones at (i, i) for 2 <= i < rho,
/// zero elsewhere. Permutation-rank rho.
UnitIntervalMatrix make_greedy_counterexample(Index rho, Index n, Index d);

}  // namespace permrank
