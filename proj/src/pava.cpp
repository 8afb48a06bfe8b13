#include "permrank/pava.hpp"

#include <algorithm>

namespace permrank {

void pava_nondecreasing(std::span<double> x, PavaScratch& s) {
  const std::size_t n = x.size();
  if (n < 2) return;
  s.level.resize(n);
  s.weight.resize(n);
  s.length.resize(n);

  std::size_t blocks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s.level[blocks] = x[i];
    s.weight[blocks] = 1.0;
    s.length[blocks] = 1;
    ++blocks;
    while (blocks > 1 && s.level[blocks - 2] > s.level[blocks - 1]) {
      const std::size_t a = blocks - 2;
      const std::size_t b = blocks - 1;
      const double w = s.weight[a] + s.weight[b];
      s.level[a] = (s.weight[a] * s.level[a] + s.weight[b] * s.level[b]) / w;
      s.weight[a] = w;
      s.length[a] += s.length[b];
      --blocks;
    }
  }
  std::size_t pos = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (int k = 0; k < s.length[b]; ++k) x[pos++] = s.level[b];
  }
}

// Each pooled block takes the minimiser of its summed cost over the common
// feasible interval: the block mean clamped to [lo of last, hi of first].
void pava_nondecreasing_bounded(std::span<double> x, std::span<const double> lo, std::span<const double> hi,
                                PavaScratch& s) {
  const std::size_t n = x.size();
  s.level.resize(n);
  s.weight.resize(n);
  s.length.resize(n);
  s.mean.resize(n);
  s.start.resize(n);

  std::size_t blocks = 0;
  for (std::size_t i = 0; i < n; ++i) {
    s.mean[blocks] = x[i];
    s.weight[blocks] = 1.0;
    s.length[blocks] = 1;
    s.start[blocks] = i;
    s.level[blocks] = std::min(std::max(x[i], lo[i]), hi[i]);
    ++blocks;
    while (blocks > 1 && s.level[blocks - 2] > s.level[blocks - 1]) {
      const std::size_t a = blocks - 2;
      const std::size_t b = blocks - 1;
      const double w = s.weight[a] + s.weight[b];
      s.mean[a] = (s.weight[a] * s.mean[a] + s.weight[b] * s.mean[b]) / w;
      s.weight[a] = w;
      s.length[a] += s.length[b];
      s.level[a] = std::min(std::max(s.mean[a], lo[i]), hi[s.start[a]]);
      --blocks;
    }
  }
  std::size_t pos = 0;
  for (std::size_t b = 0; b < blocks; ++b) {
    for (int k = 0; k < s.length[b]; ++k) x[pos++] = s.level[b];
  }
}

}  // namespace permrank
