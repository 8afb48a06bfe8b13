#pragma once

#include "permrank/decomposition.hpp"
#include "permrank/matrix.hpp"
#include "permrank/projection.hpp"

#include <cstdint>
#include <vector>

namespace permrank {

struct SpectralReport {
  std::vector<double> singular_values;  ///< descending
  double frobenius_sq = 0.0;
  double op_norm = 0.0;
};

SpectralReport spectral_report(const DenseMatrix& m);

/// Sum of squared singular values with index > s (one-based), i.e. the
/// squared distance from m to the nearest rank-s matrix.
double singular_tail(const DenseMatrix& m, Index s);

/// Rank-s_tilde approximation of a bimonotone component: columns are grouped
/// by which of s_tilde equal sub-intervals of [0, n] their sum falls in, and
/// each group is replaced by one representative column (the first, or the
/// entrywise smallest when `minimal_representative`).
UnitIntervalMatrix chatterjee_approximation(const BimonotoneComponent& c, Index s_tilde, bool minimal_representative);

struct BoundCheck {
  double measured = 0.0;
  double bound = 0.0;
  bool pass = false;
};

/// Tail of the decomposition's sum beyond s versus rho * n * d / floor(s / rho),
/// which equals rho^2 n d / s when rho divides s.
BoundCheck verify_tail_bound_pr(const PermRankDecomposition& dec, Index s);

/// Tail beyond s of a matrix with non-negative rank at most r versus
/// n d max((r - s) / r, 0). Refuses inputs whose numerical rank exceeds r.
BoundCheck verify_tail_bound_nn(const UnitIntervalMatrix& m, Index r, Index s);

/// min over rank-one matrices of ||m - u v^T||_F^2 = ||m||_F^2 - sigma_1^2.
double best_rank_one_gap(const DenseMatrix& m);

struct HausdorffReport {
  Index k = 0;
  Index n = 0;
  Index d = 0;
  Index effective_rows = 0;
  Index effective_cols = 0;
  double block_gap = 0.0;    ///< ||W||_F^2 - ||W||_op^2 for one block W
  double certificate = 0.0;  ///< k * block_gap, a lower bound on the squared distance to NR(k)
  double scaled = 0.0;       ///< certificate / (n d / k)
};

HausdorffReport hausdorff_gap_report(Index k, Index n, Index d);

struct ConvexityGap {
  double distance_sq = 0.0;  ///< min over permutation pairs of the squared projection distance
  PermutationPair best_pair;
  double scaled = 0.0;       ///< distance_sq / (n d)
};

/// Exact squared distance from `m` to permutation-rank-one matrices, by
/// projecting onto every bimonotone set. n, d <= 5.
ConvexityGap distance_to_pr1(const DenseMatrix& m, const ProjectionConfig& cfg = {});

/// distance_to_pr1 of the midpoint of the two quadrant witnesses.
ConvexityGap convexity_gap_estimate(Index n, Index d, const ProjectionConfig& cfg = {});

/// Uniform entries projected onto bimonotone matrices, then randomly permuted.
BimonotoneComponent random_bimonotone(Index n, Index d, std::uint64_t seed);

/// Sum of rho random bimonotone matrices, each scaled by 1 / rho.
PermRankDecomposition random_perm_rank(Index rho, Index n, Index d, std::uint64_t seed);

/// Uniformly random permutation of {0..m-1} (Fisher-Yates on counter draws).
Permutation random_permutation(std::size_t m, std::uint64_t seed, std::uint64_t stream_offset = 0);

}  // namespace permrank
