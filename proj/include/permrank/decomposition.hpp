#pragma once

#include "permrank/matrix.hpp"
#include "permrank/permutation.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace permrank {

struct MembershipResult {
  bool member = false;
  /// Present when `member`: a pair that renders the matrix bimonotone.
  std::optional<PermutationPair> witness;
};

/// Finds row/column permutations making `m` bimonotone, if any exist.
///
/// Rows are sorted by row sum and columns by column sum (ties by index), then
/// the arrangement is checked. In any bimonotone arrangement the rows form an
/// entrywise chain, so the sum order is forced up to equal rows.
MembershipResult bimonotone_arrangement(const DenseMatrix& m, double tol = kBimonotoneTolerance);

/// Permutation-rank-one membership of a [0,1] matrix.
MembershipResult pr1_membership(const UnitIntervalMatrix& m);

/// A [0,1] matrix together with permutations under which it is bimonotone.
class BimonotoneComponent {
 public:
  BimonotoneComponent(UnitIntervalMatrix matrix, PermutationPair perms);

  /// Wraps a matrix using the witness from pr1_membership; throws if none.
  static BimonotoneComponent certify(UnitIntervalMatrix matrix);

  const UnitIntervalMatrix& matrix() const { return matrix_; }
  const PermutationPair& perms() const { return perms_; }

 private:
  UnitIntervalMatrix matrix_;
  PermutationPair perms_;
};

/// Ordered list of same-shape bimonotone components whose sum lies in [0,1].
/// Its length is the permutation-rank upper bound it certifies.
class PermRankDecomposition {
 public:
  static constexpr double kSumTolerance = 1e-12;

  PermRankDecomposition(Index rows, Index cols, std::vector<BimonotoneComponent> components);
  explicit PermRankDecomposition(std::vector<BimonotoneComponent> components);

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t size() const { return components_.size(); }
  const std::vector<BimonotoneComponent>& components() const { return components_; }
  const BimonotoneComponent& operator[](std::size_t i) const { return components_[i]; }

  DenseMatrix sum() const;

 private:
  Index rows_;
  Index cols_;
  std::vector<BimonotoneComponent> components_;
};

struct UniquenessVerdict {
  bool satisfied = true;
  /// Zero-indexed (row, col) coordinates where two or more components have a
  /// non-zero entry distinct from the rest of that component.
  std::vector<std::pair<Index, Index>> violations;
  Eigen::MatrixXi counts;
};

inline constexpr double kDefaultEqualityTolerance = 1e-9;

/// Necessary condition for the decomposition to be unique: at every
/// coordinate, at most one component holds a non-zero value that appears
/// nowhere else in that component.
UniquenessVerdict check_uniqueness_necessary(const PermRankDecomposition& dec,
                                             double eq_tol = kDefaultEqualityTolerance);

}  // namespace permrank
