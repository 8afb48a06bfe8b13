#include "permrank/decomposition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace permrank {

MembershipResult bimonotone_arrangement(const DenseMatrix& m, double tol) {
  const Eigen::VectorXd row_sums = m.rowwise().sum();
  const Eigen::VectorXd col_sums = m.colwise().sum().transpose();
  PermutationPair p{
      Permutation::ranking(std::span<const double>(row_sums.data(), static_cast<std::size_t>(row_sums.size()))),
      Permutation::ranking(std::span<const double>(col_sums.data(), static_cast<std::size_t>(col_sums.size())))};
  if (!is_bimonotone_under(m, p, tol)) return {false, std::nullopt};
  return {true, std::move(p)};
}

MembershipResult pr1_membership(const UnitIntervalMatrix& m) { return bimonotone_arrangement(m.matrix()); }

BimonotoneComponent::BimonotoneComponent(UnitIntervalMatrix matrix, PermutationPair perms)
    : matrix_(std::move(matrix)), perms_(std::move(perms)) {
  if (!is_bimonotone_under(matrix_.matrix(), perms_)) {
    throw std::invalid_argument("BimonotoneComponent: matrix is not bimonotone under the given permutations");
  }
}

BimonotoneComponent BimonotoneComponent::certify(UnitIntervalMatrix matrix) {
  auto verdict = pr1_membership(matrix);
  if (!verdict.member) {
    throw std::invalid_argument("BimonotoneComponent::certify: matrix has permutation-rank above one");
  }
  return BimonotoneComponent(std::move(matrix), std::move(*verdict.witness));
}

PermRankDecomposition::PermRankDecomposition(Index rows, Index cols,
                                             std::vector<BimonotoneComponent> components)
    : rows_(rows), cols_(cols), components_(std::move(components)) {
  for (const auto& c : components_) {
    if (c.matrix().rows() != rows_ || c.matrix().cols() != cols_) {
      throw DimensionError("PermRankDecomposition: components differ in shape");
    }
  }
  const DenseMatrix s = sum();
  if (s.size() > 0 && (s.minCoeff() < -kSumTolerance || s.maxCoeff() > 1.0 + kSumTolerance)) {
    throw std::invalid_argument("PermRankDecomposition: component sum leaves [0, 1]");
  }
}

namespace {
Index leading_rows(const std::vector<BimonotoneComponent>& c) { return c.empty() ? 0 : c.front().matrix().rows(); }
Index leading_cols(const std::vector<BimonotoneComponent>& c) { return c.empty() ? 0 : c.front().matrix().cols(); }
}  // namespace

// Shape is read before the vector moves; argument evaluation order is unspecified.
PermRankDecomposition::PermRankDecomposition(std::vector<BimonotoneComponent> components)
    : PermRankDecomposition(leading_rows(components), leading_cols(components), {}) {
  components_ = std::move(components);
  for (const auto& c : components_) {
    if (c.matrix().rows() != rows_ || c.matrix().cols() != cols_) {
      throw DimensionError("PermRankDecomposition: components differ in shape");
    }
  }
  const DenseMatrix s = sum();
  if (s.size() > 0 && (s.minCoeff() < -kSumTolerance || s.maxCoeff() > 1.0 + kSumTolerance)) {
    throw std::invalid_argument("PermRankDecomposition: component sum leaves [0, 1]");
  }
}

DenseMatrix PermRankDecomposition::sum() const {
  DenseMatrix s = DenseMatrix::Zero(rows_, cols_);
  for (const auto& c : components_) s += c.matrix().matrix();
  return s;
}

UniquenessVerdict check_uniqueness_necessary(const PermRankDecomposition& dec, double eq_tol) {
  UniquenessVerdict out;
  out.counts = Eigen::MatrixXi::Zero(dec.rows(), dec.cols());
  const Index total = dec.rows() * dec.cols();
  std::vector<Index> order(static_cast<std::size_t>(total));

  for (const auto& comp : dec.components()) {
    const DenseMatrix& m = comp.matrix().matrix();
    const double* values = m.data();
    std::iota(order.begin(), order.end(), Index{0});
    std::sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] < values[b]; });
    // After sorting, the nearest other value is one of the two neighbours.
    for (std::size_t k = 0; k < order.size(); ++k) {
      const double v = values[order[k]];
      if (std::abs(v) <= eq_tol) continue;
      const bool below_distinct = k == 0 || v - values[order[k - 1]] > eq_tol;
      const bool above_distinct = k + 1 == order.size() || values[order[k + 1]] - v > eq_tol;
      if (below_distinct && above_distinct) {
        const Index flat = order[k];
        out.counts(flat % m.rows(), flat / m.rows()) += 1;
      }
    }
  }
  for (Index i = 0; i < dec.rows(); ++i) {
    for (Index j = 0; j < dec.cols(); ++j) {
      if (out.counts(i, j) >= 2) out.violations.emplace_back(i, j);
    }
  }
  out.satisfied = out.violations.empty();
  return out;
}

}  // namespace permrank
