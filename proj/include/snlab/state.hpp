#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "snlab/grid.hpp"

namespace snlab {

using Complex = std::complex<double>;
using ComplexField = std::vector<Complex>;
using RealField = std::vector<double>;

/// Discrete sum of |f|^2 times the cell measure.
double field_norm(const Grid& grid, std::span<const Complex> field);

/// Scalar wave function on a grid. The plain constructor keeps the amplitudes
/// as given; `normalized` and `renormalize` enforce unit norm.
class WaveFunction {
 public:
  WaveFunction(Grid grid, ComplexField amplitudes);

  static WaveFunction normalized(Grid grid, ComplexField amplitudes);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  std::span<Complex> amplitudes() noexcept { return amplitudes_; }
  ComplexField& data() noexcept { return amplitudes_; }

  void renormalize();
  RealField density() const;

 private:
  Grid grid_;
  ComplexField amplitudes_;
};

/// Gaussian packet whose density has rms spread `width` along every axis,
/// centred at `centre` and carrying mean momentum `momentum` (hbar = m = 1).
WaveFunction make_gaussian(const Grid& grid, double width, std::array<double, 3> centre = {},
                           std::array<double, 3> momentum = {});

/// Two-component spatial wave function for a spin-1/2 particle; plus/minus are
/// the amplitudes along |z+> and |z->. The combined norm is one.
class SpinorWaveFunction {
 public:
  SpinorWaveFunction(Grid grid, ComplexField plus, ComplexField minus);

  static SpinorWaveFunction normalized(Grid grid, ComplexField plus, ComplexField minus);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> plus() const noexcept { return plus_; }
  std::span<const Complex> minus() const noexcept { return minus_; }
  ComplexField& plus_data() noexcept { return plus_; }
  ComplexField& minus_data() noexcept { return minus_; }

  double plus_norm() const;
  double minus_norm() const;
  double total_norm() const { return plus_norm() + minus_norm(); }
  void renormalize();

 private:
  Grid grid_;
  ComplexField plus_;
  ComplexField minus_;
};

/// Two distinguishable particles on a 1D grid, amplitude Psi(x1, x2) stored
/// row-major with x1 slowest: index = i1 * n + i2.
class TwoParticleWaveFunction {
 public:
  TwoParticleWaveFunction(Grid grid, ComplexField amplitudes);

  static TwoParticleWaveFunction normalized(Grid grid, ComplexField amplitudes);
  /// Psi(x1, x2) = a(x1) b(x2), normalized.
  static TwoParticleWaveFunction product(const WaveFunction& first, const WaveFunction& second);

  const Grid& grid() const noexcept { return grid_; }
  std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }
  ComplexField& data() noexcept { return amplitudes_; }

  double norm() const;
  void renormalize();
  /// Single-particle marginal densities of particle 1 and particle 2.
  std::array<RealField, 2> marginals() const;

 private:
  Grid grid_;
  ComplexField amplitudes_;
};

/// Time-stamped observables. Energies are in internal units; width is the rms
/// spread sqrt(<|r - <r>|^2>) of the density.
struct DiagnosticsRecord {
  double time = 0.0;
  double norm = 0.0;
  double kinetic_energy = 0.0;
  double gravitational_energy = 0.0;
  double total_energy = 0.0;
  std::array<double, 3> centre_of_mass{};
  double width = 0.0;
  std::vector<double> packet_positions;
};

}  // namespace snlab
