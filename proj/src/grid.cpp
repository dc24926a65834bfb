#include "snlab/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "snlab/errors.hpp"

namespace snlab {

Grid::Grid(int dimension, int points_per_axis, double spacing)
    : dimension_(dimension), n_(points_per_axis), spacing_(spacing) {
  if (dimension != 1 && dimension != 3) {
    throw InvalidArgument("grid dimension must be 1 or 3, got " + std::to_string(dimension));
  }
  if (points_per_axis < 8 || points_per_axis % 2 != 0) {
    throw InvalidArgument("points_per_axis must be even and >= 8, got " +
                          std::to_string(points_per_axis));
  }
  if (!(spacing > 0.0) || !std::isfinite(spacing)) {
    throw InvalidArgument("grid spacing must be positive and finite");
  }
  coords_.resize(static_cast<std::size_t>(n_));
  wavenumbers_.resize(static_cast<std::size_t>(n_));
  const double dk = 2.0 * std::numbers::pi / (n_ * spacing_);
  for (int j = 0; j < n_; ++j) {
    coords_[static_cast<std::size_t>(j)] = (j - n_ / 2) * spacing_;
    const int fj = j < n_ / 2 ? j : j - n_;
    wavenumbers_[static_cast<std::size_t>(j)] = fj * dk;
  }
}

Grid Grid::with_box(int dimension, int points_per_axis, double box_length) {
  if (points_per_axis <= 0) {
    throw InvalidArgument("points_per_axis must be positive");
  }
  return Grid(dimension, points_per_axis, box_length / points_per_axis);
}

double Grid::box_volume() const noexcept { return std::pow(box_length(), dimension_); }

double Grid::cell_volume() const noexcept { return std::pow(spacing_, dimension_); }

std::size_t Grid::size() const noexcept {
  std::size_t s = 1;
  for (int a = 0; a < dimension_; ++a) s *= static_cast<std::size_t>(n_);
  return s;
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const noexcept {
  const auto n = static_cast<std::size_t>(n_);
  if (dimension_ == 1) return {static_cast<int>(flat), 0, 0};
  return {static_cast<int>(flat / (n * n)), static_cast<int>((flat / n) % n),
          static_cast<int>(flat % n)};
}

std::array<double, 3> Grid::position(std::size_t flat) const noexcept {
  const auto idx = unflatten(flat);
  if (dimension_ == 1) return {coords_[static_cast<std::size_t>(idx[0])], 0.0, 0.0};
  return {coords_[static_cast<std::size_t>(idx[0])], coords_[static_cast<std::size_t>(idx[1])],
          coords_[static_cast<std::size_t>(idx[2])]};
}

double Grid::k_squared(std::size_t flat) const noexcept {
  const auto idx = unflatten(flat);
  double k2 = 0.0;
  for (int a = 0; a < dimension_; ++a) {
    const double k = wavenumbers_[static_cast<std::size_t>(idx[static_cast<std::size_t>(a)])];
    k2 += k * k;
  }
  return k2;
}

}  // namespace snlab
