#pragma once

// Ewald sums for the simple cubic lattice of unit side with a neutralizing
// background.

#include <cmath>
#include <numbers>

namespace oracle {

/// lim_{r->0} [G(r) - 1/r] = -alpha for the zero-mean periodic Green's function
/// of -laplacian / (4 pi) in a unit cube.
inline double cubic_madelung(double eta = 2.0, int real_shells = 6, int recip_shells = 12) {
  const double pi = std::numbers::pi;
  double real = 0.0;
  for (int i = -real_shells; i <= real_shells; ++i) {
    for (int j = -real_shells; j <= real_shells; ++j) {
      for (int k = -real_shells; k <= real_shells; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        const double r = std::sqrt(double(i * i + j * j + k * k));
        real += std::erfc(eta * r) / r;
      }
    }
  }
  double recip = 0.0;
  for (int i = -recip_shells; i <= recip_shells; ++i) {
    for (int j = -recip_shells; j <= recip_shells; ++j) {
      for (int k = -recip_shells; k <= recip_shells; ++k) {
        if (i == 0 && j == 0 && k == 0) continue;
        const double k2 = 4.0 * pi * pi * double(i * i + j * j + k * k);
        recip += 4.0 * pi * std::exp(-k2 / (4.0 * eta * eta)) / k2;
      }
    }
  }
  return -(real + recip - pi / (eta * eta) - 2.0 * eta / std::sqrt(pi));
}

}  // namespace oracle
