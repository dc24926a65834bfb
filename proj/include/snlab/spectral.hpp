#pragma once

#include <complex>
#include <optional>
#include <span>
#include <string>

#include "snlab/fft.hpp"
#include "snlab/grid.hpp"
#include "snlab/state.hpp"

namespace snlab {

enum class KernelKind { newtonian_3d, softened_1d, gaussian_smeared_3d };

std::string to_string(KernelKind kind);
KernelKind kernel_kind_from_string(const std::string& name);

/// Interaction kernel of the Newtonian self-potential.
///
/// `image_correction` applies only to the 3D kernels: the periodic solution is
/// shifted to approximate the isolated (free-space) potential by removing the
/// neutralizing-background and lattice-image contributions to second order in
/// |r - r_c| / L. potential_from_density never applies it.
struct KernelSpec {
  KernelKind kind = KernelKind::newtonian_3d;
  double softening = 0.0;  // epsilon, softened_1d only
  double smearing = 0.0;   // R0, gaussian_smeared_3d only
  bool image_correction = true;

  static KernelSpec newtonian();
  static KernelSpec softened(double epsilon);
  static KernelSpec gaussian_smeared(double r0);
  /// newtonian_3d on 3D grids, softened_1d with epsilon = 2 * spacing on 1D grids.
  static KernelSpec default_for(const Grid& grid);

  int dimension() const noexcept { return kind == KernelKind::softened_1d ? 1 : 3; }
  /// Throws InvalidArgument for bad parameters or a grid of the wrong dimension.
  void validate(const Grid& grid) const;
};

/// Fourier transform of the real-space kernel at |k|^2 = k2; the k = 0 value is 0.
double kernel_symbol(const KernelSpec& kernel, double k2);

/// Madelung-type constant of the simple cubic lattice with a neutralizing
/// background: lim_{r->0} [G_periodic(r) - 1/r] = -alpha / L.
inline constexpr double kCubicMadelung = 2.8372974794806;

/// Periodic solve of the Newtonian potential on a fixed grid. The symbol is
/// tabulated once; calls are const and safe to run concurrently.
class PoissonSolver {
 public:
  PoissonSolver(const Grid& grid, KernelSpec kernel);

  const Grid& grid() const noexcept { return grid_; }
  const KernelSpec& kernel() const noexcept { return kernel_; }
  std::span<const double> symbol() const noexcept { return symbol_; }
  const Fft& fft() const noexcept { return fft_; }
  bool corrects_images() const noexcept { return correct_; }

  /// Phi = -kappa * IFFT(symbol * FFT(density)); zero mean.
  RealField periodic_potential(std::span<const double> density, double kappa) const;
  /// Periodic potential plus the image correction when enabled.
  RealField potential(std::span<const double> density, double kappa) const;
  /// 1/2 * integral(density * potential), consistent with potential().
  double interaction_energy(std::span<const double> density, double kappa) const;

 private:
  Grid grid_;
  KernelSpec kernel_;
  Fft fft_;
  RealField symbol_;
  bool correct_;
};

/// Requires density >= 0 and unit mass to 1e-6; no image correction.
RealField potential_from_density(const Grid& grid, std::span<const double> density,
                                 const KernelSpec& kernel, double kappa);

/// Multiplies amplitudes in k-space by exp(-z * k^2 / 2). With z = i*dt/2 this
/// is half a step of the free propagator; with real z it is the imaginary-time
/// version.
class KineticPropagator {
 public:
  KineticPropagator(const Grid& grid, std::complex<double> z);
  void apply(std::span<Complex> field) const;
  /// Applies the propagator along both axes of an n x n two-particle field.
  void apply_pair(std::span<Complex> field) const;

 private:
  Grid grid_;
  Fft fft_;
  ComplexField factor_;
  std::optional<Fft> pair_fft_;
  ComplexField pair_factor_;
};

WaveFunction kinetic_half_step(const WaveFunction& state, double dt);

/// <psi| k^2/2 |psi> evaluated spectrally.
double kinetic_energy(const Grid& grid, std::span<const Complex> field);

/// V_SN psi written as a sum over the discrete k lattice,
///   -(kappa / (2 pi^2)) * sum_k w <L^dag(k)> L(k) psi,  L(k) = exp(i k.r) / |k|,
/// with w = (2 pi / box)^3 and k = 0 omitted. Equals potential_from_density(|psi|^2) * psi.
ComplexField kspace_nonlinear_term(const WaveFunction& state, double kappa);

/// Expectation values <L^dag(k)> = <exp(-i k.r)> / |k| on the FFT-ordered k lattice
/// (zero at k = 0).
ComplexField mode_expectations(const WaveFunction& state);

}  // namespace snlab
