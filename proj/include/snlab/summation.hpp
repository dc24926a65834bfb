#pragma once

#include <cstddef>

namespace snlab {

/// Pairwise (cascade) summation of f(0) + ... + f(n-1). The reduction tree
/// depends only on n, so results are reproducible and the rounding error
/// grows like log(n).
template <typename T, typename F>
T pairwise_sum(std::size_t begin, std::size_t end, const F& f) {
  constexpr std::size_t kBlock = 64;
  if (end - begin <= kBlock) {
    T acc{};
    for (std::size_t i = begin; i < end; ++i) acc += f(i);
    return acc;
  }
  const std::size_t mid = begin + (end - begin) / 2;
  return pairwise_sum<T>(begin, mid, f) + pairwise_sum<T>(mid, end, f);
}

template <typename T, typename F>
T pairwise_sum(std::size_t n, const F& f) {
  return pairwise_sum<T>(std::size_t{0}, n, f);
}

}  // namespace snlab
