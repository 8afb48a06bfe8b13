#include "permrank/estimate.hpp"

#include "permrank/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace permrank {
namespace {

// Ascending ranking where entries within `tol` of the start of their run count
// as ties and keep index order.
Permutation ranking_with_ties(const Eigen::VectorXd& keys, double tol) {
  const auto m = static_cast<std::size_t>(keys.size());
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return keys(static_cast<Index>(a)) < keys(static_cast<Index>(b));
  });
  for (std::size_t start = 0; start < m;) {
    std::size_t end = start + 1;
    const double head = keys(static_cast<Index>(order[start]));
    while (end < m && keys(static_cast<Index>(order[end])) - head <= tol) ++end;
    std::sort(order.begin() + static_cast<std::ptrdiff_t>(start), order.begin() + static_cast<std::ptrdiff_t>(end));
    start = end;
  }
  return Permutation::from_order(order);
}

double positive_mass(const Eigen::VectorXd& v) { return v.cwiseMax(0.0).norm(); }
double negative_mass(const Eigen::VectorXd& v) { return v.cwiseMin(0.0).norm(); }

// Flip decision for one singular pair: positive part of u must dominate.
bool needs_flip(const Eigen::VectorXd& u, const Eigen::VectorXd& v) {
  constexpr double kTie = 1e-12;
  const double up = positive_mass(u);
  const double un = negative_mass(u);
  if (std::abs(up - un) > kTie) return up < un;
  const double vp = positive_mass(v);
  const double vn = negative_mass(v);
  if (std::abs(vp - vn) > kTie) return vp < vn;
  for (Index i = 0; i < u.size(); ++i) {
    if (std::abs(u(i)) > kTie) return u(i) < 0.0;
  }
  return false;
}

void require_small(Index n, Index d, Index limit, const char* what) {
  if (n > limit || d > limit) {
    throw std::invalid_argument(std::string(what) + ": permutation enumeration is limited to " +
                                std::to_string(limit) + "x" + std::to_string(limit) + " matrices, got " +
                                std::to_string(n) + "x" + std::to_string(d));
  }
}

}  // namespace

// --- SVT --------------------------------------------------------------------

void SvtConfig::validate() const {
  if (!std::isfinite(threshold) || threshold < 0.0) {
    throw std::invalid_argument("SvtConfig: threshold must be finite and non-negative");
  }
}

double default_svt_threshold(Index n, Index d, double p_obs) {
  require_p_obs(p_obs, "default_svt_threshold");
  if (n < 1 || d < 1) throw DimensionError("default_svt_threshold: n and d must be positive");
  return 2.1 * std::sqrt(static_cast<double>(n + d) / p_obs);
}

DenseMatrix soft_threshold_singular_values(const DenseMatrix& y_prime, double threshold) {
  const Svd svd = thin_svd(y_prime);
  const Eigen::VectorXd shrunk = (svd.s.array() - threshold).cwiseMax(0.0).matrix();
  return svd.u * shrunk.asDiagonal() * svd.v.transpose();
}

DenseMatrix svt_estimate(const ObservationMatrix& y, const SvtConfig& cfg) {
  cfg.validate();
  DenseMatrix est = soft_threshold_singular_values(recenter(y), cfg.threshold);
  if (cfg.clip_output) est = est.cwiseMax(0.0).cwiseMin(1.0);
  return est;
}

// --- Regularized least squares ---------------------------------------------

void RegularizerSpec::validate() const {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw std::invalid_argument("RegularizerSpec: scale must be positive");
  if (!std::isfinite(exponent)) throw std::invalid_argument("RegularizerSpec: exponent must be finite");
}

double regularizer_value(const RegularizerSpec& spec, int k, Index n, Index d, double p_obs) {
  spec.validate();
  require_p_obs(p_obs, "regularizer_value");
  if (k < 0) throw std::invalid_argument("regularizer_value: k must be non-negative");
  if (k == 0) return 0.0;
  const double log_nd = std::log(static_cast<double>(n) * static_cast<double>(d));
  return spec.scale * k * static_cast<double>(std::max(n, d)) * std::pow(log_nd, spec.exponent) / p_obs;
}

RegularizedLsResult brute_force_regularized_ls(const ObservationMatrix& y, int max_k, const RegularizerSpec& spec,
                                               const ProjectionConfig& cfg) {
  return brute_force_regularized_ls(recenter(y), y.p_obs(), max_k, spec, cfg);
}

RegularizedLsResult brute_force_regularized_ls(const DenseMatrix& y_prime, double p_obs, int max_k,
                                               const RegularizerSpec& spec, const ProjectionConfig& cfg) {
  const Index n = y_prime.rows();
  const Index d = y_prime.cols();
  if (max_k < 0 || max_k > 2) throw std::invalid_argument("brute_force_regularized_ls: max_k must be 0, 1 or 2");
  if (max_k == 2) require_small(n, d, 3, "brute_force_regularized_ls (max_k = 2)");
  if (max_k == 1) require_small(n, d, 5, "brute_force_regularized_ls (max_k = 1)");
  spec.validate();
  cfg.validate();

  RegularizedLsResult best;
  best.estimate = DenseMatrix::Zero(n, d);
  best.fit_error = y_prime.squaredNorm();
  best.objective = best.fit_error;
  best.candidates = 1;

  const auto consider = [&](int k, DenseMatrix fitted, std::vector<PermutationPair> perms) {
    ++best.candidates;
    const double fit_error = (y_prime - fitted).squaredNorm();
    const double objective = fit_error + regularizer_value(spec, k, n, d, p_obs);
    if (objective < best.objective) {
      best.estimate = std::move(fitted);
      best.chosen_k = k;
      best.perms = std::move(perms);
      best.fit_error = fit_error;
      best.objective = objective;
    }
  };

  if (max_k >= 1) {
    const auto pairs = all_permutation_pairs(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
    for (const auto& p : pairs) consider(1, project_bimonotone(y_prime, p, cfg).matrix, {p});
    if (max_k == 2) {
      for (std::size_t a = 0; a < pairs.size(); ++a) {
        for (std::size_t b = a + 1; b < pairs.size(); ++b) {
          std::vector<PermutationPair> tuple{pairs[a], pairs[b]};
          SumFit fit = fit_sum_of_bimonotone(y_prime, tuple, cfg);
          consider(2, std::move(fit.fitted), std::move(tuple));
        }
      }
    }
  }
  return best;
}

// --- Two-step ---------------------------------------------------------------

TwoStepResult two_step_estimate(const ObservationMatrix& y, const TwoStepOptions& opts) {
  return two_step_estimate(recenter(y), opts);
}

TwoStepResult two_step_estimate(const DenseMatrix& y_prime, const TwoStepOptions& opts) {
  const Index n = y_prime.rows();
  const Index d = y_prime.cols();
  if (opts.rho_star < 1 || opts.rho_star > std::min(n, d)) {
    throw std::invalid_argument("two_step_estimate: rho_star must lie in [1, min(n, d)]");
  }
  TwoStepResult out;
  const Svd svd = thin_svd(y_prime);
  out.singular_values = svd.s;
  const Index available = svd.s.size() == 0 || svd.s(0) == 0.0
                              ? 0
                              : static_cast<Index>((svd.s.array() > kRankThreshold * svd.s(0)).count());

  out.left_factors.resize(n, available);
  out.right_factors.resize(d, available);
  for (Index l = 0; l < available; ++l) {
    Eigen::VectorXd u = svd.u.col(l);
    Eigen::VectorXd v = svd.v.col(l);
    if (needs_flip(u, v)) {
      u = -u;
      v = -v;
    }
    const double root = std::sqrt(svd.s(l));
    out.left_factors.col(l) = root * u;
    out.right_factors.col(l) = root * v;
  }

  for (Index l = 0; l < available && static_cast<int>(out.perms.size()) < opts.rho_star; ++l) {
    const Eigen::VectorXd a = out.left_factors.col(l);
    const Eigen::VectorXd b = out.right_factors.col(l);
    PermutationPair pair{ranking_with_ties(a, 1e-12 * std::max(1.0, a.cwiseAbs().maxCoeff())),
                         ranking_with_ties(b, 1e-12 * std::max(1.0, b.cwiseAbs().maxCoeff()))};
    if (opts.distinct_permutations && std::find(out.perms.begin(), out.perms.end(), pair) != out.perms.end()) {
      continue;
    }
    out.perms.push_back(std::move(pair));
  }

  if (static_cast<int>(out.perms.size()) < opts.rho_star) {
    out.warnings.push_back("two_step_estimate: only " + std::to_string(out.perms.size()) +
                           " usable singular pairs for rho_star=" + std::to_string(opts.rho_star));
  }
  if (out.perms.empty()) {
    out.estimate = DenseMatrix::Zero(n, d);
    return out;
  }
  SumFit fit = fit_sum_of_bimonotone(y_prime, out.perms, opts.projection);
  out.estimate = std::move(fit.fitted);
  out.fit_sweeps = fit.sweeps;
  out.fit_converged = fit.converged;
  if (!fit.converged) {
    out.warnings.push_back("two_step_estimate: least-squares step stopped after " + std::to_string(fit.sweeps) +
                           " sweeps without meeting the tolerance");
  }
  return out;
}

// --- Greedy -----------------------------------------------------------------

GreedyResult greedy_decompose(const UnitIntervalMatrix& m, const GreedyOptions& opts) {
  if (opts.norm_q != 2.0) {
    throw std::invalid_argument("greedy_decompose: only q = 2 has an exact inner minimization");
  }
  if (opts.max_steps < 1) throw std::invalid_argument("greedy_decompose: max_steps must be positive");
  const Index n = m.rows();
  const Index d = m.cols();
  require_small(n, d, 5, "greedy_decompose");

  const auto pairs = all_permutation_pairs(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
  ProjectionConfig box = opts.projection;
  box.lower_bound = 0.0;
  box.upper_bound = 1.0;

  GreedyResult out;
  out.residual = m.matrix();
  if (out.residual.norm() < opts.residual_tolerance) {
    out.terminated = true;
    return out;
  }
  while (out.steps < opts.max_steps) {
    DenseMatrix best;
    const PermutationPair* best_pair = nullptr;
    double best_obj = 0.0;
    for (const auto& p : pairs) {
      DenseMatrix cand = opts.capped
                             ? project_bimonotone_below(out.residual, p, out.residual.cwiseMin(1.0).cwiseMax(0.0), box).matrix
                             : project_bimonotone(out.residual, p, box).matrix;
      const double obj = (out.residual - cand).squaredNorm();
      // Ties go to the lexicographically first permutation pair.
      if (best_pair == nullptr || obj < best_obj - 1e-12) {
        best = std::move(cand);
        best_pair = &p;
        best_obj = obj;
      }
    }
    ++out.steps;
    if (best.norm() == 0.0) {
      out.stalled = true;
      out.residual_norms.push_back(out.residual.norm());
      break;
    }
    out.residual -= best;
    out.components.emplace_back(UnitIntervalMatrix(std::move(best), Clamp::kYes), *best_pair);
    out.residual_norms.push_back(out.residual.norm());
    if (out.residual_norms.back() < opts.residual_tolerance) {
      out.terminated = true;
      break;
    }
  }
  return out;
}

}  // namespace permrank
