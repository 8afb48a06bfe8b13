#include "permrank/analyze.hpp"

#include "permrank/constructors.hpp"
#include "permrank/linalg.hpp"
#include "permrank/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace permrank {

SpectralReport spectral_report(const DenseMatrix& m) {
  const Eigen::VectorXd s = singular_values(m);
  SpectralReport r;
  r.singular_values.assign(s.data(), s.data() + s.size());
  r.frobenius_sq = m.squaredNorm();
  r.op_norm = s.size() > 0 ? s(0) : 0.0;
  return r;
}

double singular_tail(const DenseMatrix& m, Index s) {
  const Index k = std::min(m.rows(), m.cols());
  if (s < 0 || s >= k) {
    throw std::out_of_range("singular_tail: s must lie in [0, min(n, d)), got " + std::to_string(s));
  }
  const Eigen::VectorXd sv = singular_values(m);
  return sv.tail(k - s).squaredNorm();
}

UnitIntervalMatrix chatterjee_approximation(const BimonotoneComponent& c, Index s_tilde, bool minimal_representative) {
  if (s_tilde < 1) throw std::invalid_argument("chatterjee_approximation: s_tilde must be positive");
  const DenseMatrix& m = c.matrix().matrix();
  const Index n = m.rows();
  const Eigen::RowVectorXd tau = m.colwise().sum();

  // Group index of each column; the last interval is closed at n.
  std::map<Index, std::vector<Index>> groups;
  for (Index j = 0; j < m.cols(); ++j) {
    const auto g = static_cast<Index>(std::floor(tau(j) * static_cast<double>(s_tilde) / static_cast<double>(n)));
    groups[std::clamp<Index>(g, 0, s_tilde - 1)].push_back(j);
  }
  DenseMatrix out(m.rows(), m.cols());
  for (const auto& [g, cols] : groups) {
    Index rep = cols.front();
    if (minimal_representative) {
      // Columns of a bimonotone matrix form a chain, so the smallest sum is entrywise smallest.
      for (Index j : cols) {
        if (tau(j) < tau(rep)) rep = j;
      }
    }
    for (Index j : cols) out.col(j) = m.col(rep);
  }
  return UnitIntervalMatrix(std::move(out));
}

BoundCheck verify_tail_bound_pr(const PermRankDecomposition& dec, Index s) {
  if (s < 1) throw std::invalid_argument("verify_tail_bound_pr: s must be positive");
  const auto rho = static_cast<Index>(std::max<std::size_t>(dec.size(), 1));
  const double nd = static_cast<double>(dec.rows()) * static_cast<double>(dec.cols());
  const Index s_tilde = s / rho;
  BoundCheck out;
  // With s_tilde = 0 only the trivial bound ||M||_F^2 <= nd is available.
  out.bound = s_tilde == 0 ? nd : static_cast<double>(rho) * nd / static_cast<double>(s_tilde);
  const Index k = std::min(dec.rows(), dec.cols());
  out.measured = s >= k ? 0.0 : singular_tail(dec.sum(), s);
  out.pass = out.measured <= out.bound;
  return out;
}

BoundCheck verify_tail_bound_nn(const UnitIntervalMatrix& m, Index r, Index s) {
  if (r < 1 || s < 1) throw std::invalid_argument("verify_tail_bound_nn: r and s must be positive");
  const int rank = numerical_rank(m.matrix());
  if (rank > r) {
    throw std::invalid_argument("verify_tail_bound_nn: numerical rank " + std::to_string(rank) +
                                " exceeds the claimed non-negative rank " + std::to_string(r));
  }
  const double nd = static_cast<double>(m.rows()) * static_cast<double>(m.cols());
  BoundCheck out;
  out.bound = nd * std::max(static_cast<double>(r - s) / static_cast<double>(r), 0.0);
  const Index k = std::min(m.rows(), m.cols());
  out.measured = s >= k ? 0.0 : singular_tail(m.matrix(), s);
  const double slack = s >= r ? 1e-8 * nd : 0.0;
  out.pass = out.measured <= out.bound + slack;
  return out;
}

double best_rank_one_gap(const DenseMatrix& m) {
  if (m.size() == 0) return 0.0;
  const double top = singular_values(m)(0);
  return std::max(m.squaredNorm() - top * top, 0.0);
}

HausdorffReport hausdorff_gap_report(Index k, Index n, Index d) {
  const HausdorffBlock hb = make_hausdorff_block(k, n, d);
  HausdorffReport r;
  r.k = k;
  r.n = n;
  r.d = d;
  r.effective_rows = hb.effective_rows;
  r.effective_cols = hb.effective_cols;
  r.block_gap = best_rank_one_gap(hb.block);
  r.certificate = static_cast<double>(k) * r.block_gap;
  r.scaled = r.certificate / (static_cast<double>(n) * static_cast<double>(d) / static_cast<double>(k));
  return r;
}

ConvexityGap distance_to_pr1(const DenseMatrix& m, const ProjectionConfig& cfg) {
  if (m.rows() > 5 || m.cols() > 5) throw std::invalid_argument("distance_to_pr1: limited to 5x5 matrices");
  ConvexityGap best;
  best.distance_sq = std::numeric_limits<double>::infinity();
  for (const auto& p : all_permutation_pairs(static_cast<std::size_t>(m.rows()), static_cast<std::size_t>(m.cols()))) {
    const double dist = (m - project_bimonotone(m, p, cfg).matrix).squaredNorm();
    if (dist < best.distance_sq - 1e-15) {
      best.distance_sq = dist;
      best.best_pair = p;
    }
  }
  best.scaled = best.distance_sq / static_cast<double>(m.size());
  return best;
}

ConvexityGap convexity_gap_estimate(Index n, Index d, const ProjectionConfig& cfg) {
  const auto [m1, m2] = make_convexity_witness_pair(n, d);
  return distance_to_pr1(0.5 * (m1.matrix() + m2.matrix()), cfg);
}

Permutation random_permutation(std::size_t m, std::uint64_t seed, std::uint64_t stream_offset) {
  const CounterRng rng(seed);
  std::vector<std::size_t> v(m);
  std::iota(v.begin(), v.end(), std::size_t{0});
  for (std::size_t i = m; i > 1; --i) {
    const double u = rng.uniform(streams::kPermutation + stream_offset, i);
    const auto j = std::min(static_cast<std::size_t>(u * static_cast<double>(i)), i - 1);
    std::swap(v[i - 1], v[j]);
  }
  return Permutation(std::move(v));
}

BimonotoneComponent random_bimonotone(Index n, Index d, std::uint64_t seed) {
  const CounterRng rng(seed);
  DenseMatrix m(n, d);
  for (Index k = 0; k < m.size(); ++k) m.data()[k] = rng.uniform(streams::kGenerator, static_cast<std::uint64_t>(k));
  // Half a normalised 2-D cumulative sum (smooth part), half a quadrant
  // prefix maximum of u^4 (staircase part). Both are bimonotone.
  DenseMatrix cum = m;
  DenseMatrix stair = m.array().pow(4.0).matrix();
  // Additions of non-negative terms only, so rounding cannot break the order.
  for (Index i = 0; i < n; ++i) {
    for (Index j = 1; j < d; ++j) {
      cum(i, j) += cum(i, j - 1);
      stair(i, j) = std::max(stair(i, j), stair(i, j - 1));
    }
  }
  for (Index i = 1; i < n; ++i) {
    cum.row(i) += cum.row(i - 1);
    stair.row(i) = stair.row(i).cwiseMax(stair.row(i - 1));
  }
  const double total = cum.size() > 0 ? cum(n - 1, d - 1) : 1.0;
  const DenseMatrix sorted = (0.5 * (cum / total) + 0.5 * stair).cwiseMin(1.0);
  // A matrix bimonotone under identity, placed by p^-1, is bimonotone under p.
  const PermutationPair p{random_permutation(static_cast<std::size_t>(n), seed, 0),
                          random_permutation(static_cast<std::size_t>(d), seed, 1)};
  return BimonotoneComponent(UnitIntervalMatrix(apply_permutation_pair(sorted, p.inverse())), p);
}

PermRankDecomposition random_perm_rank(Index rho, Index n, Index d, std::uint64_t seed) {
  if (rho < 1) throw std::invalid_argument("random_perm_rank: rho must be positive");
  const CounterRng root(seed);
  std::vector<BimonotoneComponent> comps;
  for (Index l = 0; l < rho; ++l) {
    const BimonotoneComponent c = random_bimonotone(n, d, root.derive(static_cast<std::uint64_t>(l)).seed());
    comps.emplace_back(UnitIntervalMatrix(c.matrix().matrix() / static_cast<double>(rho)), c.perms());
  }
  return PermRankDecomposition(n, d, std::move(comps));
}

}  // namespace permrank
