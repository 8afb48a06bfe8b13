#pragma once

#include "permrank/matrix.hpp"

#include <compare>
#include <cstddef>
#include <span>
#include <vector>

namespace permrank {

/// A bijection on {0, ..., m-1}. `p[i]` is the position index i moves to.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> mapping);

  static Permutation identity(std::size_t m);

  /// Builds the permutation that places `order[k]` at position k.
  static Permutation from_order(std::span<const std::size_t> order);

  /// Ranks `keys` ascending; equal keys keep index order.
  static Permutation ranking(std::span<const double> keys);

  std::size_t size() const { return mapping_.size(); }
  std::size_t operator[](std::size_t i) const { return mapping_[i]; }
  const std::vector<std::size_t>& mapping() const { return mapping_; }

  Permutation inverse() const;
  /// order()[k] is the original index that lands at position k.
  std::vector<std::size_t> order() const { return inverse().mapping_; }

  auto operator<=>(const Permutation&) const = default;

 private:
  std::vector<std::size_t> mapping_;
};

struct PermutationPair {
  Permutation row_perm;
  Permutation col_perm;

  static PermutationPair identity(std::size_t n_rows, std::size_t n_cols);
  PermutationPair inverse() const { return {row_perm.inverse(), col_perm.inverse()}; }

  auto operator<=>(const PermutationPair&) const = default;
};

/// output(i, j) = m(row_perm^-1(i), col_perm^-1(j)).
DenseMatrix apply_permutation_pair(const DenseMatrix& m, const PermutationPair& p);

/// True when `m` becomes bimonotone once `p` is applied.
bool is_bimonotone_under(const DenseMatrix& m, const PermutationPair& p,
                         double tol = kBimonotoneTolerance);

/// All permutations of {0..m-1} in lexicographic order of their mappings.
std::vector<Permutation> all_permutations(std::size_t m);

/// All (row, col) pairs, lexicographic by row permutation then column permutation.
std::vector<PermutationPair> all_permutation_pairs(std::size_t n_rows, std::size_t n_cols);

}  // namespace permrank
