#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace snlab {

/// Uniform periodic lattice, 1D or 3D, with the same number of points and the
/// same spacing along every axis. Coordinates are (j - n/2) * spacing so the
/// origin sits on index n/2; wavenumbers follow FFT ordering.
///
/// 3D fields are stored row-major with axis 0 slowest: index = (i*n + j)*n + k.
class Grid {
 public:
  Grid(int dimension, int points_per_axis, double spacing);

  /// Grid of `points_per_axis` points covering a box of side `box_length`.
  static Grid with_box(int dimension, int points_per_axis, double box_length);

  int dimension() const noexcept { return dimension_; }
  int points_per_axis() const noexcept { return n_; }
  double spacing() const noexcept { return spacing_; }
  double box_length() const noexcept { return spacing_ * n_; }
  double box_volume() const noexcept;
  double cell_volume() const noexcept;
  std::size_t size() const noexcept;

  std::span<const double> coordinates() const noexcept { return coords_; }
  std::span<const double> wavenumbers() const noexcept { return wavenumbers_; }
  double coordinate(int j) const { return coords_[static_cast<std::size_t>(j)]; }
  double wavenumber(int j) const { return wavenumbers_[static_cast<std::size_t>(j)]; }

  /// Per-axis lattice indices of a flat index (unused axes are zero).
  std::array<int, 3> unflatten(std::size_t flat) const noexcept;
  /// Position vector of a flat index (unused axes are zero).
  std::array<double, 3> position(std::size_t flat) const noexcept;
  /// Squared wavenumber magnitude at a flat k-space index.
  double k_squared(std::size_t flat) const noexcept;

  bool operator==(const Grid& other) const noexcept {
    return dimension_ == other.dimension_ && n_ == other.n_ && spacing_ == other.spacing_;
  }

 private:
  int dimension_;
  int n_;
  double spacing_;
  std::vector<double> coords_;
  std::vector<double> wavenumbers_;
};

}  // namespace snlab
