#pragma once

#include "permrank/matrix.hpp"

#include <cstdint>
#include <vector>

namespace permrank {

/// Partially observed binary ratings: 1 (like), 0 (dislike), 1/2 (no data),
/// together with the probability that each entry was observed.
class ObservationMatrix {
 public:
  ObservationMatrix(DenseMatrix values, double p_obs);

  const DenseMatrix& values() const { return values_; }
  double p_obs() const { return p_obs_; }
  Index rows() const { return values_.rows(); }
  Index cols() const { return values_.cols(); }

 private:
  DenseMatrix values_;
  double p_obs_;
};

/// Zero-mean noise with entries bounded by one in absolute value.
class NoiseMatrix {
 public:
  explicit NoiseMatrix(DenseMatrix values);
  const DenseMatrix& values() const { return values_; }

 private:
  DenseMatrix values_;
};

void require_p_obs(double p_obs, const char* what);

/// Each entry independently: 1 w.p. p*M*, 0 w.p. p*(1-M*), 1/2 w.p. 1-p.
ObservationMatrix sample_observations(const UnitIntervalMatrix& m_star, double p_obs, std::uint64_t seed);

/// Y' = Y / p - (1 - p) / (2p). Unbiased for M*.
DenseMatrix recenter(const ObservationMatrix& y);

/// Inverse of recenter for a known p_obs: Y = p Y' + (1 - p) / 2.
DenseMatrix uncenter(const DenseMatrix& y_prime, double p_obs);

/// Fraction of entries that are not 1/2.
double estimate_p_obs(const ObservationMatrix& y);

/// Samples W' such that Y' = M* + W' / p. With the same seed as
/// sample_observations the two draws are coupled entry by entry.
NoiseMatrix sample_noise_matrix(const UnitIntervalMatrix& m_star, double p_obs, std::uint64_t seed);

struct OpNormCheck {
  double threshold = 0.0;          ///< 2.01 * sqrt(p (n + d))
  double fraction_within = 0.0;    ///< share of trials with ||W'||_op <= threshold
  std::vector<double> op_norms;    ///< one per trial
  bool regime_satisfied = false;   ///< p >= log^7(nd) / min(n, d)
};

/// Monte-Carlo check of the operator-norm bound on W'. The ground truth is
/// the all-1/2 matrix, which maximizes the per-entry variance.
OpNormCheck empirical_opnorm_check(Index n, Index d, double p_obs, int trials, std::uint64_t seed);

}  // namespace permrank
