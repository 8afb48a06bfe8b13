#include "permrank/constructors.hpp"

#include "permrank/rng.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace permrank {
namespace {

void require_positive(Index v, const char* what) {
  if (v < 1) throw DimensionError(std::string(what) + " must be at least 1");
}

}  // namespace

UnitIntervalMatrix make_upper_triangular_ones(Index k) {
  require_positive(k, "make_upper_triangular_ones: k");
  DenseMatrix m = DenseMatrix::Zero(k, k);
  for (Index i = 0; i < k; ++i) {
    for (Index j = i; j < k; ++j) m(i, j) = 1.0;
  }
  return UnitIntervalMatrix(std::move(m));
}

UnitIntervalMatrix make_rank_pair_matrix(Index rho, Index r, Index n, Index d) {
  require_positive(n, "make_rank_pair_matrix: n");
  require_positive(d, "make_rank_pair_matrix: d");
  if (rho < 1 || rho > r || r > std::min(n, d)) {
    throw std::invalid_argument("make_rank_pair_matrix: need 1 <= rho <= r <= min(n, d), got rho=" +
                                std::to_string(rho) + " r=" + std::to_string(r));
  }
  DenseMatrix m = DenseMatrix::Zero(n, d);
  const Index j_size = r - rho + 1;
  m.topLeftCorner(j_size, j_size) = make_upper_triangular_ones(j_size).matrix();
  for (Index t = 0; t < rho - 1; ++t) m(j_size + t, j_size + t) = 1.0;
  return UnitIntervalMatrix(std::move(m));
}

UnitIntervalMatrix make_triangular_halves(Index n) {
  require_positive(n, "make_triangular_halves: n");
  DenseMatrix m = DenseMatrix::Zero(n, n);
  for (Index i = 0; i < n; ++i) {
    m(i, i) = 0.5;
    for (Index j = 0; j < i; ++j) m(i, j) = 1.0;
  }
  return UnitIntervalMatrix(std::move(m));
}

HausdorffBlock make_hausdorff_block(Index k, Index n, Index d) {
  require_positive(k, "make_hausdorff_block: k");
  if (2 * k > std::min(n, d)) {
    throw std::invalid_argument("make_hausdorff_block: k=" + std::to_string(k) +
                                " exceeds min(n, d) / 2");
  }
  const Index half_r = n / (2 * k);
  const Index half_c = d / (2 * k);
  DenseMatrix block = DenseMatrix::Ones(2 * half_r, 2 * half_c);
  block.bottomRightCorner(half_r, half_c).setZero();

  DenseMatrix m = DenseMatrix::Zero(n, d);
  for (Index b = 0; b < k; ++b) {
    m.block(b * 2 * half_r, b * 2 * half_c, 2 * half_r, 2 * half_c) = block;
  }
  return {UnitIntervalMatrix(std::move(m)), k, 2 * half_r * k, 2 * half_c * k, std::move(block)};
}

std::pair<UnitIntervalMatrix, UnitIntervalMatrix> make_convexity_witness_pair(Index n, Index d) {
  if (n < 2 || d < 2) throw DimensionError("make_convexity_witness_pair: need n, d >= 2");
  const Index top = n / 2;
  const Index left = d / 2;
  DenseMatrix m1 = DenseMatrix::Zero(n, d);
  DenseMatrix m2 = DenseMatrix::Zero(n, d);
  m1.topLeftCorner(top, left).setOnes();
  m2.bottomRightCorner(n - top, d - left).setOnes();
  return {UnitIntervalMatrix(std::move(m1)), UnitIntervalMatrix(std::move(m2))};
}

UnitIntervalMatrix generate_convex_combination_model(Index n, Index d, Index r, std::uint64_t seed) {
  require_positive(n, "generate_convex_combination_model: n");
  require_positive(d, "generate_convex_combination_model: d");
  if (r < 1 || r > std::min(n, d)) {
    throw std::invalid_argument("generate_convex_combination_model: need 1 <= r <= min(n, d)");
  }
  const CounterRng rng(seed);
  const auto draw = [&](std::uint64_t counter) { return rng.uniform(streams::kGenerator, counter); };
  const auto stride = static_cast<std::uint64_t>(2 * n + d);

  DenseMatrix u(n, r);
  DenseMatrix v(d, r);
  DenseMatrix alpha(n, r);
  for (Index l = 0; l < r; ++l) {
    const std::uint64_t base = static_cast<std::uint64_t>(l) * stride;
    for (Index i = 0; i < n; ++i) u(i, l) = draw(base + static_cast<std::uint64_t>(i));
    for (Index j = 0; j < d; ++j) v(j, l) = draw(base + static_cast<std::uint64_t>(n + j));
    // Exponential spacings normalize to a uniform point on the simplex.
    for (Index i = 0; i < n; ++i) {
      alpha(i, l) = -std::log1p(-draw(base + static_cast<std::uint64_t>(n + d + i)));
    }
  }
  for (Index i = 0; i < n; ++i) {
    const double total = alpha.row(i).sum();
    if (total > 0.0) {
      alpha.row(i) /= total;
    } else {
      alpha.row(i).setConstant(1.0 / static_cast<double>(r));
    }
  }
  DenseMatrix m = alpha.cwiseProduct(u) * v.transpose();
  return UnitIntervalMatrix(std::move(m), Clamp::kYes);
}

}  // namespace permrank

namespace permrank {
namespace {

std::array<Index, 3> group_sizes(Index m, const char* what) {
  if (m < 4) throw DimensionError(std::string(what) + ": need at least 4 rows and columns");
  const auto rest = static_cast<double>(m - 1);
  const Index g1 = static_cast<Index>(std::floor(0.684 * rest + 1e-9));
  const Index g3 = std::max<Index>(1, static_cast<Index>(std::floor(0.012 * rest + 1e-9)));
  const Index g2 = m - 1 - g1 - g3;
  if (g1 < 1 || g2 < 1) throw DimensionError(std::string(what) + ": size too small for three groups");
  return {g1, g2, g3};
}

DenseMatrix factor_columns(Index m, const std::array<Index, 3>& g) {
  DenseMatrix f = DenseMatrix::Zero(m, 3);
  f(0, 0) = 1.0;
  f.block(1, 0, g[0], 1).setConstant(0.9);
  f.block(1 + g[0], 0, g[1], 1).setConstant(0.8);
  f.block(1, 1, g[0], 1).setConstant(0.2);
  f.block(1 + g[0], 1, g[1], 1).setConstant(-0.1);
  f.block(1 + g[0] + g[1], 2, g[2], 1).setConstant(1.0);
  return f;
}

}  // namespace

TwoStepCounterexample make_two_step_counterexample(Index n, Index d) {
  const auto rg = group_sizes(n, "make_two_step_counterexample");
  const auto cg = group_sizes(d, "make_two_step_counterexample");
  const DenseMatrix a = factor_columns(n, rg);
  const DenseMatrix b = factor_columns(d, cg);
  DenseMatrix first = a.leftCols(2) * b.leftCols(2).transpose();
  DenseMatrix second = a.col(2) * b.col(2).transpose();
  // Products like .9*.9 + .2*.2 can land a hair outside [0,1].
  first = first.cwiseMax(0.0).cwiseMin(1.0);
  return TwoStepCounterexample{UnitIntervalMatrix(first + second, Clamp::kYes),
                               UnitIntervalMatrix(std::move(first)),
                               UnitIntervalMatrix(std::move(second)),
                               a,
                               b,
                               rg,
                               cg};
}

UnitIntervalMatrix make_greedy_counterexample(Index rho, Index n, Index d) {
  if (rho < 2 || rho > std::min(n, d)) {
    throw std::invalid_argument("make_greedy_counterexample: need 2 <= rho <= min(n, d), got rho=" +
                                std::to_string(rho));
  }
  DenseMatrix m = DenseMatrix::Zero(n, d);
  m(0, 1) = 0.6;
  m(1, 0) = 0.6;
  m(1, 1) = 0.4;
  for (Index i = 2; i < rho; ++i) m(i, i) = 1.0;
  return UnitIntervalMatrix(std::move(m));
}

}  // namespace permrank
