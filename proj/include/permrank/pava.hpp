#pragma once

#include <span>
#include <vector>

namespace permrank {

/// Pool-adjacent-violators: replaces `x` by its Euclidean projection onto
/// non-decreasing sequences. `scratch` is reused across calls to avoid
/// reallocation.
struct PavaScratch {
  std::vector<double> level;
  std::vector<double> weight;
  std::vector<int> length;
  std::vector<double> mean;
  std::vector<std::size_t> start;
};

void pava_nondecreasing(std::span<double> x, PavaScratch& scratch);

/// Projection onto non-decreasing sequences with lo[k] <= x[k] <= hi[k].
/// Both bound sequences must themselves be non-decreasing with lo <= hi.
void pava_nondecreasing_bounded(std::span<double> x, std::span<const double> lo, std::span<const double> hi,
                                PavaScratch& scratch);

inline void pava_nondecreasing(std::span<double> x) {
  PavaScratch scratch;
  pava_nondecreasing(x, scratch);
}

}  // namespace permrank
