#include "permrank/observe.hpp"

#include "permrank/linalg.hpp"
#include "permrank/rng.hpp"

#include <cmath>
#include <iostream>
#include <string>

namespace permrank {
namespace {

enum class Outcome { kLike, kDislike, kMissing };

// One uniform draw decides the entry, shared by the observation and noise samplers.
Outcome draw_outcome(const CounterRng& rng, Index flat, double m, double p_obs) {
  const double u = rng.uniform(streams::kObservation, static_cast<std::uint64_t>(flat));
  if (u < p_obs * m) return Outcome::kLike;
  if (u < p_obs) return Outcome::kDislike;
  return Outcome::kMissing;
}

}  // namespace

void require_p_obs(double p_obs, const char* what) {
  if (!(p_obs > 0.0 && p_obs <= 1.0)) {
    throw std::invalid_argument(std::string(what) + ": p_obs must lie in (0, 1], got " + std::to_string(p_obs));
  }
}

ObservationMatrix::ObservationMatrix(DenseMatrix values, double p_obs) : values_(std::move(values)), p_obs_(p_obs) {
  require_p_obs(p_obs_, "ObservationMatrix");
  for (Index k = 0; k < values_.size(); ++k) {
    const double v = values_.data()[k];
    if (v != 0.0 && v != 0.5 && v != 1.0) {
      throw std::invalid_argument("ObservationMatrix: entries must be 0, 0.5 or 1");
    }
  }
}

NoiseMatrix::NoiseMatrix(DenseMatrix values) : values_(std::move(values)) {
  require_finite(values_, "NoiseMatrix");
  if (values_.size() > 0 && values_.cwiseAbs().maxCoeff() > 1.0) {
    throw std::invalid_argument("NoiseMatrix: entries must be bounded by 1 in absolute value");
  }
}

ObservationMatrix sample_observations(const UnitIntervalMatrix& m_star, double p_obs, std::uint64_t seed) {
  require_p_obs(p_obs, "sample_observations");
  const CounterRng rng(seed);
  const DenseMatrix& m = m_star.matrix();
  DenseMatrix y(m.rows(), m.cols());
  for (Index k = 0; k < m.size(); ++k) {
    switch (draw_outcome(rng, k, m.data()[k], p_obs)) {
      case Outcome::kLike: y.data()[k] = 1.0; break;
      case Outcome::kDislike: y.data()[k] = 0.0; break;
      case Outcome::kMissing: y.data()[k] = 0.5; break;
    }
  }
  return ObservationMatrix(std::move(y), p_obs);
}

DenseMatrix recenter(const ObservationMatrix& y) {
  const double p = y.p_obs();
  return (y.values().array() / p - (1.0 - p) / (2.0 * p)).matrix();
}

DenseMatrix uncenter(const DenseMatrix& y_prime, double p_obs) {
  require_p_obs(p_obs, "uncenter");
  return (y_prime.array() * p_obs + (1.0 - p_obs) / 2.0).matrix();
}

double estimate_p_obs(const ObservationMatrix& y) {
  if (y.values().size() == 0) return 0.0;
  const auto observed = (y.values().array() != 0.5).count();
  return static_cast<double>(observed) / static_cast<double>(y.values().size());
}

NoiseMatrix sample_noise_matrix(const UnitIntervalMatrix& m_star, double p_obs, std::uint64_t seed) {
  require_p_obs(p_obs, "sample_noise_matrix");
  const CounterRng rng(seed);
  const DenseMatrix& m = m_star.matrix();
  DenseMatrix w(m.rows(), m.cols());
  for (Index k = 0; k < m.size(); ++k) {
    const double mk = m.data()[k];
    const double shift = p_obs * (0.5 - mk);
    switch (draw_outcome(rng, k, mk, p_obs)) {
      case Outcome::kLike: w.data()[k] = shift + 0.5; break;
      case Outcome::kDislike: w.data()[k] = shift - 0.5; break;
      case Outcome::kMissing: w.data()[k] = shift; break;
    }
  }
  return NoiseMatrix(std::move(w));
}

OpNormCheck empirical_opnorm_check(Index n, Index d, double p_obs, int trials, std::uint64_t seed) {
  require_p_obs(p_obs, "empirical_opnorm_check");
  if (n < 1 || d < 1 || trials < 1) throw std::invalid_argument("empirical_opnorm_check: n, d, trials must be positive");
  OpNormCheck out;
  out.threshold = 2.01 * std::sqrt(p_obs * static_cast<double>(n + d));
  const double log_nd = std::log(static_cast<double>(n) * static_cast<double>(d));
  out.regime_satisfied = p_obs >= std::pow(log_nd, 7.0) / static_cast<double>(std::min(n, d));
  if (!out.regime_satisfied) {
    std::cerr << "warning: empirical_opnorm_check: p_obs=" << p_obs
              << " is below log^7(nd)/min(n,d); the bound is not claimed in this regime\n";
  }
  const UnitIntervalMatrix half(DenseMatrix::Constant(n, d, 0.5));
  const CounterRng root(seed);
  int within = 0;
  for (int t = 0; t < trials; ++t) {
    const NoiseMatrix w = sample_noise_matrix(half, p_obs, root.derive(static_cast<std::uint64_t>(t)).seed());
    const double norm = operator_norm(w.values());
    out.op_norms.push_back(norm);
    if (norm <= out.threshold) ++within;
  }
  out.fraction_within = static_cast<double>(within) / static_cast<double>(trials);
  return out;
}

}  // namespace permrank
