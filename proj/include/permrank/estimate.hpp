#pragma once

#include "permrank/decomposition.hpp"
#include "permrank/matrix.hpp"
#include "permrank/observe.hpp"
#include "permrank/permutation.hpp"
#include "permrank/projection.hpp"

#include <optional>
#include <string>
#include <vector>

namespace permrank {

// ---------------------------------------------------------------------------
// Singular value thresholding

struct SvtConfig {
  double threshold = 0.0;
  bool clip_output = true;

  void validate() const;
};

/// 2.1 * sqrt((n + d) / p_obs).
double default_svt_threshold(Index n, Index d, double p_obs);

/// Soft-thresholds the singular values of `y_prime` at `threshold`.
DenseMatrix soft_threshold_singular_values(const DenseMatrix& y_prime, double threshold);

/// Recenters `y`, soft-thresholds its spectrum and optionally clips to [0,1].
DenseMatrix svt_estimate(const ObservationMatrix& y, const SvtConfig& cfg);

// ---------------------------------------------------------------------------
// Regularized least squares by enumeration

struct RegularizerSpec {
  double scale = 1.0;
  double exponent = 2.01;

  void validate() const;
};

/// scale * k * max(n, d) * log^exponent(n d) / p_obs.
double regularizer_value(const RegularizerSpec& spec, int k, Index n, Index d, double p_obs);

struct RegularizedLsResult {
  DenseMatrix estimate;
  int chosen_k = 0;
  std::vector<PermutationPair> perms;
  double fit_error = 0.0;     ///< ||Y' - estimate||_F^2
  double objective = 0.0;     ///< fit_error + regularizer
  std::size_t candidates = 0;
};

/// Exhaustively minimizes ||Y' - M||_F^2 + regularizer(k) over k <= max_k and
/// every k-tuple of permutation pairs. Only for tiny matrices: n, d <= 5 when
/// max_k = 1 and n, d <= 3 when max_k = 2.
RegularizedLsResult brute_force_regularized_ls(const ObservationMatrix& y, int max_k, const RegularizerSpec& spec,
                                               const ProjectionConfig& cfg = {});
RegularizedLsResult brute_force_regularized_ls(const DenseMatrix& y_prime, double p_obs, int max_k,
                                               const RegularizerSpec& spec, const ProjectionConfig& cfg = {});

// ---------------------------------------------------------------------------
// Two-step estimator: permutations from the SVD, then least squares

struct TwoStepOptions {
  int rho_star = 1;
  /// Walk down the spectrum until rho_star distinct permutation pairs are found.
  bool distinct_permutations = false;
  ProjectionConfig projection;
};

struct TwoStepResult {
  DenseMatrix estimate;
  std::vector<PermutationPair> perms;
  /// Sign-normalized factors a_l = sqrt(s_l) u_l and b_l = sqrt(s_l) v_l, one column each.
  DenseMatrix left_factors;
  DenseMatrix right_factors;
  Eigen::VectorXd singular_values;
  std::vector<std::string> warnings;
  int fit_sweeps = 0;
  bool fit_converged = false;
};

TwoStepResult two_step_estimate(const ObservationMatrix& y, const TwoStepOptions& opts);
/// Same, starting from an already recentered matrix (e.g. the noiseless Y = M*).
TwoStepResult two_step_estimate(const DenseMatrix& y_prime, const TwoStepOptions& opts);

// ---------------------------------------------------------------------------
// Greedy permutation-rank decomposition

struct GreedyOptions {
  double norm_q = 2.0;
  /// Restrict each step to 0 <= M' <= residual.
  bool capped = true;
  int max_steps = 16;
  /// Stop once ||residual||_F falls below this.
  double residual_tolerance = 1e-8;
  ProjectionConfig projection;
};

struct GreedyResult {
  std::vector<BimonotoneComponent> components;
  DenseMatrix residual;
  std::vector<double> residual_norms;  ///< after each step
  int steps = 0;
  /// Residual reached zero.
  bool terminated = false;
  /// No component could reduce the residual further; the loop would repeat forever.
  bool stalled = false;
};

/// Repeatedly subtracts the best permutation-rank-one fit of the residual,
/// searching every permutation pair. Only q = 2 and matrices up to 5 x 5.
GreedyResult greedy_decompose(const UnitIntervalMatrix& m, const GreedyOptions& opts = {});

}  // namespace permrank
