#include "permrank/linalg.hpp"

#include "permrank/rng.hpp"

#include <cmath>

namespace permrank {

Svd thin_svd(const DenseMatrix& a) {
  Eigen::BDCSVD<DenseMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Eigen::VectorXd singular_values(const DenseMatrix& a) {
  if (a.size() == 0) return {};
  return Eigen::BDCSVD<DenseMatrix>(a).singularValues();
}

int numerical_rank(const DenseMatrix& a, double rel_threshold) {
  const Eigen::VectorXd s = singular_values(a);
  if (s.size() == 0 || s(0) == 0.0) return 0;
  int rank = 0;
  for (Index k = 0; k < s.size(); ++k) {
    if (s(k) > rel_threshold * s(0)) ++rank;
  }
  return rank;
}

double operator_norm(const DenseMatrix& a, const PowerIterationConfig& cfg) {
  if (a.size() == 0) return 0.0;
  if (a.rows() < cfg.svd_cutoff && a.cols() < cfg.svd_cutoff) return singular_values(a)(0);

  const CounterRng rng(0x5EED0F0F0F0F0F0FULL);
  Eigen::VectorXd v(a.cols());
  for (Index j = 0; j < v.size(); ++j) {
    v(j) = rng.uniform(streams::kPowerIteration, static_cast<std::uint64_t>(j)) - 0.5;
  }
  v.normalize();
  double estimate = 0.0;
  for (int it = 0; it < cfg.max_iterations; ++it) {
    Eigen::VectorXd w = a.transpose() * (a * v);
    const double norm = w.norm();
    if (norm == 0.0) return 0.0;
    // Rayleigh quotient of A^T A at unit v.
    const double next = std::sqrt(v.dot(w));
    v = w / norm;
    if (it > 0 && std::abs(next - estimate) <= cfg.tolerance * next) return next;
    estimate = next;
  }
  return estimate;
}

}  // namespace permrank
