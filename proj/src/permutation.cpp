#include "permrank/permutation.hpp"

#include <algorithm>
#include <numeric>
#include <string>

namespace permrank {

Permutation::Permutation(std::vector<std::size_t> mapping) : mapping_(std::move(mapping)) {
  std::vector<bool> seen(mapping_.size(), false);
  for (std::size_t v : mapping_) {
    if (v >= mapping_.size() || seen[v]) {
      throw std::invalid_argument("Permutation: mapping is not a bijection on {0.." +
                                  std::to_string(mapping_.size()) + "-1}");
    }
    seen[v] = true;
  }
}

Permutation Permutation::identity(std::size_t m) {
  std::vector<std::size_t> v(m);
  std::iota(v.begin(), v.end(), std::size_t{0});
  return Permutation(std::move(v));
}

Permutation Permutation::from_order(std::span<const std::size_t> order) {
  std::vector<std::size_t> v(order.size(), order.size());
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] >= order.size()) throw std::invalid_argument("Permutation: order out of range");
    v[order[k]] = k;
  }
  return Permutation(std::move(v));
}

Permutation Permutation::ranking(std::span<const double> keys) {
  std::vector<std::size_t> order(keys.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
  return from_order(order);
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(mapping_.size());
  for (std::size_t i = 0; i < mapping_.size(); ++i) inv[mapping_[i]] = i;
  Permutation out;
  out.mapping_ = std::move(inv);
  return out;
}

PermutationPair PermutationPair::identity(std::size_t n_rows, std::size_t n_cols) {
  return {Permutation::identity(n_rows), Permutation::identity(n_cols)};
}

DenseMatrix apply_permutation_pair(const DenseMatrix& m, const PermutationPair& p) {
  if (p.row_perm.size() != static_cast<std::size_t>(m.rows()) ||
      p.col_perm.size() != static_cast<std::size_t>(m.cols())) {
    throw DimensionError("apply_permutation_pair: permutation lengths " +
                         std::to_string(p.row_perm.size()) + "x" +
                         std::to_string(p.col_perm.size()) + " do not match matrix " +
                         std::to_string(m.rows()) + "x" + std::to_string(m.cols()));
  }
  DenseMatrix out(m.rows(), m.cols());
  for (Index j = 0; j < m.cols(); ++j) {
    const auto jj = static_cast<Index>(p.col_perm[static_cast<std::size_t>(j)]);
    for (Index i = 0; i < m.rows(); ++i) {
      out(static_cast<Index>(p.row_perm[static_cast<std::size_t>(i)]), jj) = m(i, j);
    }
  }
  return out;
}

bool is_bimonotone_under(const DenseMatrix& m, const PermutationPair& p, double tol) {
  return is_bimonotone(apply_permutation_pair(m, p), tol);
}

std::vector<Permutation> all_permutations(std::size_t m) {
  std::vector<std::size_t> v(m);
  std::iota(v.begin(), v.end(), std::size_t{0});
  std::vector<Permutation> out;
  do {
    out.emplace_back(v);
  } while (std::next_permutation(v.begin(), v.end()));
  return out;
}

std::vector<PermutationPair> all_permutation_pairs(std::size_t n_rows, std::size_t n_cols) {
  const auto rows = all_permutations(n_rows);
  const auto cols = all_permutations(n_cols);
  std::vector<PermutationPair> out;
  out.reserve(rows.size() * cols.size());
  for (const auto& r : rows) {
    for (const auto& c : cols) out.push_back({r, c});
  }
  return out;
}

}  // namespace permrank
