#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <span>
#include <vector>

#include "snlab/state.hpp"

namespace testing {

inline double rel_l2(std::span<const std::complex<double>> a, std::span<const std::complex<double>> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += std::norm(a[i] - b[i]);
    den += std::norm(b[i]);
  }
  return std::sqrt(num / den);
}

inline double rel_l2(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

/// Smooth random state: complex white noise under a Gaussian envelope of the
/// given width, plus a random offset of the envelope centre.
inline snlab::WaveFunction random_state(const snlab::Grid& grid, std::mt19937_64& rng, double width) {
  std::normal_distribution<double> normal;
  std::uniform_real_distribution<double> shift(-0.1 * grid.box_length(), 0.1 * grid.box_length());
  const std::array<double, 3> c{shift(rng), shift(rng), shift(rng)};
  snlab::ComplexField amps(grid.size());
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto r = grid.position(i);
    double e = 0.0;
    for (int a = 0; a < grid.dimension(); ++a) {
      const double d = r[static_cast<std::size_t>(a)] - c[static_cast<std::size_t>(a)];
      e -= d * d / (4.0 * width * width);
    }
    amps[i] = std::exp(e) * std::complex<double>(normal(rng), normal(rng));
  }
  return snlab::WaveFunction::normalized(grid, std::move(amps));
}

}  // namespace testing
