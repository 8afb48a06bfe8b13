#include "permrank/projection.hpp"

#include "permrank/pava.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>

namespace permrank {
namespace {

// Isotonic fit of one chain restricted to lo <= x <= hi. Tightening the bounds
// to their monotone envelopes leaves the feasible set unchanged, and with
// monotone bounds the clamped isotonic fit is the projection.
// Bounds along each column replaced by their monotone envelopes: a running
// max of lo from the top and a running min of hi from the bottom.
struct ChainBounds {
  DenseMatrix lo;
  DenseMatrix hi;
};

ChainBounds chain_envelopes(const DenseMatrix& lo, const DenseMatrix& hi) {
  ChainBounds b{lo, hi};
  for (Index j = 0; j < lo.cols(); ++j) {
    for (Index i = 1; i < lo.rows(); ++i) b.lo(i, j) = std::max(b.lo(i, j), b.lo(i - 1, j));
    for (Index i = lo.rows() - 1; i-- > 0;) b.hi(i, j) = std::min(b.hi(i, j), b.hi(i + 1, j));
  }
  return b;
}

// Row chains work on transposed storage so every chain is contiguous.
void project_chains(DenseMatrix& m, const ChainBounds& b, PavaScratch& scratch) {
  const auto len = static_cast<std::size_t>(m.rows());
  for (Index j = 0; j < m.cols(); ++j) {
    pava_nondecreasing_bounded(std::span<double>(m.col(j).data(), len),
                               std::span<const double>(b.lo.col(j).data(), len),
                               std::span<const double>(b.hi.col(j).data(), len), scratch);
  }
}

// Largest bimonotone matrix below m: suffix minimum over the lower-right quadrant.
void suffix_min(DenseMatrix& m) {
  for (Index i = m.rows() - 1; i >= 0; --i) {
    for (Index j = m.cols() - 1; j >= 0; --j) {
      double v = m(i, j);
      if (i + 1 < m.rows()) v = std::min(v, m(i + 1, j));
      if (j + 1 < m.cols()) v = std::min(v, m(i, j + 1));
      m(i, j) = v;
    }
  }
}

// Dykstra on an arranged (identity-permutation) problem over two sets: rows
// monotone within the box, and columns monotone within the box.
ProjectionResult dykstra(const DenseMatrix& target, const DenseMatrix& lo, const DenseMatrix& hi,
                         const ProjectionConfig& cfg) {
  const Index n = target.rows();
  const Index d = target.cols();
  const ChainBounds row_bounds = chain_envelopes(lo.transpose(), hi.transpose());
  const ChainBounds col_bounds = chain_envelopes(lo, hi);
  DenseMatrix x = target;
  DenseMatrix p_row = DenseMatrix::Zero(n, d);
  DenseMatrix p_col = DenseMatrix::Zero(n, d);
  DenseMatrix y(n, d), yt(d, n), z(n, d);
  PavaScratch scratch;
  const Index size = n * d;

  ProjectionResult out;
  for (int it = 1; it <= cfg.max_iterations; ++it) {
    yt = (x + p_row).transpose();
    project_chains(yt, row_bounds, scratch);
    y = yt.transpose();

    double row_step = 0.0;
    for (Index k = 0; k < size; ++k) {
      const double delta = x.data()[k] - y.data()[k];
      p_row.data()[k] += delta;
      row_step += delta * delta;
      z.data()[k] = y.data()[k] + p_col.data()[k];
    }
    project_chains(z, col_bounds, scratch);

    double col_step = 0.0;
    for (Index k = 0; k < size; ++k) {
      const double delta = y.data()[k] - z.data()[k];
      p_col.data()[k] += delta;
      col_step += delta * delta;
    }

    // The iterate alone can stall while the corrections still move; a fixed
    // point needs both correction increments to vanish.
    out.residual = std::sqrt(row_step + col_step);
    x.swap(z);
    out.iterations = it;
    if (out.residual < cfg.tolerance) {
      out.converged = true;
      break;
    }
  }
  // The iterate is in the box; remove the remaining sub-tolerance order violations.
  x = x.cwiseMax(lo).cwiseMin(hi);
  suffix_min(x);
  out.matrix = std::move(x);
  return out;
}

ProjectionResult project_arranged(const DenseMatrix& target, const PermutationPair& perms, const DenseMatrix& lo,
                                  const DenseMatrix& hi, const ProjectionConfig& cfg) {
  require_finite(target, "project_bimonotone");
  const DenseMatrix arranged = apply_permutation_pair(target, perms);
  const PermutationPair inv = perms.inverse();
  ProjectionResult r = dykstra(arranged, apply_permutation_pair(lo, perms), apply_permutation_pair(hi, perms), cfg);
  r.matrix = apply_permutation_pair(r.matrix, inv);
  return r;
}

}  // namespace

void ProjectionConfig::validate() const {
  if (!(tolerance > 0.0)) throw std::invalid_argument("ProjectionConfig: tolerance must be positive");
  if (max_iterations < 1) throw std::invalid_argument("ProjectionConfig: max_iterations must be positive");
  if (!(lower_bound <= upper_bound)) throw std::invalid_argument("ProjectionConfig: lower_bound exceeds upper_bound");
}

ProjectionResult project_bimonotone(const DenseMatrix& target, const PermutationPair& perms,
                                    const ProjectionConfig& cfg) {
  cfg.validate();
  const DenseMatrix lo = DenseMatrix::Constant(target.rows(), target.cols(), cfg.lower_bound);
  const DenseMatrix hi = DenseMatrix::Constant(target.rows(), target.cols(), cfg.upper_bound);
  return project_arranged(target, perms, lo, hi, cfg);
}

ProjectionResult project_bimonotone_below(const DenseMatrix& target, const PermutationPair& perms,
                                          const DenseMatrix& cap, const ProjectionConfig& cfg) {
  cfg.validate();
  require_same_shape(target, cap, "project_bimonotone_below");
  require_finite(cap, "project_bimonotone_below");
  if (cap.size() > 0 && cap.minCoeff() < cfg.lower_bound) {
    throw std::invalid_argument("project_bimonotone_below: cap falls below the lower bound");
  }
  const DenseMatrix lo = DenseMatrix::Constant(target.rows(), target.cols(), cfg.lower_bound);
  return project_arranged(target, perms, lo, cap, cfg);
}

SumFit fit_sum_of_bimonotone(const DenseMatrix& y_prime, std::span<const PermutationPair> perm_list,
                             const ProjectionConfig& cfg) {
  cfg.validate();
  if (perm_list.empty()) throw std::invalid_argument("fit_sum_of_bimonotone: empty permutation list");
  require_finite(y_prime, "fit_sum_of_bimonotone");
  const Index n = y_prime.rows();
  const Index d = y_prime.cols();
  const std::size_t k = perm_list.size();

  std::vector<DenseMatrix> comps(k, DenseMatrix::Constant(n, d, 0.0));
  DenseMatrix total = DenseMatrix::Zero(n, d);
  double objective = (y_prime - total).squaredNorm();

  SumFit fit{PermRankDecomposition(n, d, {}), {}, {}, objective, 0, false};
  for (int sweep = 1; sweep <= cfg.max_iterations; ++sweep) {
    const double before = objective;
    for (std::size_t l = 0; l < k; ++l) {
      const DenseMatrix others = total - comps[l];
      const DenseMatrix cap = (DenseMatrix::Constant(n, d, cfg.upper_bound) - others).cwiseMax(cfg.lower_bound);
      DenseMatrix candidate = project_bimonotone_below(y_prime - others, perm_list[l], cap, cfg).matrix;
      const double cand_obj = (y_prime - others - candidate).squaredNorm();
      // Keep the old block if solver noise would raise the objective.
      if (cand_obj <= objective) {
        comps[l] = std::move(candidate);
        total = others + comps[l];
        objective = cand_obj;
      }
    }
    fit.objective_trace.push_back(objective);
    fit.sweeps = sweep;
    if (before - objective < cfg.tolerance) {
      fit.converged = true;
      break;
    }
  }

  std::vector<BimonotoneComponent> out;
  out.reserve(k);
  for (std::size_t l = 0; l < k; ++l) {
    out.emplace_back(UnitIntervalMatrix(comps[l], Clamp::kYes), perm_list[l]);
  }
  fit.decomposition = PermRankDecomposition(n, d, std::move(out));
  fit.fitted = fit.decomposition.sum();
  fit.objective = objective;
  return fit;
}

}  // namespace permrank
