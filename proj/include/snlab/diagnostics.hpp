#pragma once

#include <array>
#include <span>
#include <vector>

#include "snlab/spectral.hpp"
#include "snlab/state.hpp"
#include "snlab/units.hpp"

namespace snlab {

/// Density moments along every axis of the grid.
struct DensityMoments {
  double mass = 0.0;
  std::array<double, 3> centre{};
  double width = 0.0;  // sqrt of the summed per-axis variances
};

/// Per-axis marginal sums of a density (no cell measure applied).
std::vector<std::vector<double>> axis_marginals(const Grid& grid, std::span<const double> density);

DensityMoments density_moments(const Grid& grid, std::span<const double> density);

/// Observables of a normalized state. The gravitational energy uses the
/// solver's potential (with image correction if the solver applies it).
/// Throws ContractViolation when the norm deviates from 1 by more than 1e-6.
DiagnosticsRecord diagnostics(const WaveFunction& state, const PoissonSolver& solver, double kappa,
                              double time = 0.0);

/// Uses the default kernel for the grid dimension and kappa from the unit system.
DiagnosticsRecord diagnostics(const WaveFunction& state, const UnitSystem& units, double time = 0.0);

/// Density-weighted mean position on each side of `split` along `axis`.
std::array<double, 2> half_axis_positions(const Grid& grid, std::span<const double> density, int axis,
                                          double split = 0.0);

}  // namespace snlab
