#include "snlab/spectral.hpp"

#include <cmath>
#include <numbers>

#include "snlab/diagnostics.hpp"
#include "snlab/errors.hpp"
#include "snlab/summation.hpp"

namespace snlab {

std::string to_string(KernelKind kind) {
  switch (kind) {
    case KernelKind::newtonian_3d: return "newtonian_3d";
    case KernelKind::softened_1d: return "softened_1d";
    case KernelKind::gaussian_smeared_3d: return "gaussian_smeared_3d";
  }
  return "unknown";
}

KernelKind kernel_kind_from_string(const std::string& name) {
  if (name == "newtonian_3d") return KernelKind::newtonian_3d;
  if (name == "softened_1d") return KernelKind::softened_1d;
  if (name == "gaussian_smeared_3d") return KernelKind::gaussian_smeared_3d;
  throw InvalidArgument("unknown kernel kind '" + name + "'");
}

KernelSpec KernelSpec::newtonian() { return KernelSpec{}; }

KernelSpec KernelSpec::softened(double epsilon) {
  KernelSpec k;
  k.kind = KernelKind::softened_1d;
  k.softening = epsilon;
  return k;
}

KernelSpec KernelSpec::gaussian_smeared(double r0) {
  KernelSpec k;
  k.kind = KernelKind::gaussian_smeared_3d;
  k.smearing = r0;
  return k;
}

KernelSpec KernelSpec::default_for(const Grid& grid) {
  return grid.dimension() == 1 ? softened(2.0 * grid.spacing()) : newtonian();
}

void KernelSpec::validate(const Grid& grid) const {
  if (grid.dimension() != dimension()) {
    throw InvalidArgument("kernel " + to_string(kind) + " needs a " + std::to_string(dimension()) +
                          "D grid, got " + std::to_string(grid.dimension()) + "D");
  }
  if (kind == KernelKind::softened_1d && !(softening > 0.0)) {
    throw InvalidArgument("softened_1d kernel needs softening > 0");
  }
  if (kind == KernelKind::gaussian_smeared_3d && !(smearing > 0.0)) {
    throw InvalidArgument("gaussian_smeared_3d kernel needs smearing > 0");
  }
}

double kernel_symbol(const KernelSpec& kernel, double k2) {
  if (k2 <= 0.0) return 0.0;
  switch (kernel.kind) {
    case KernelKind::newtonian_3d:
      return 4.0 * std::numbers::pi / k2;
    case KernelKind::softened_1d:
      // integral of exp(-ikx) / sqrt(x^2 + eps^2) dx
      return 2.0 * std::cyl_bessel_k(0.0, std::sqrt(k2) * kernel.softening);
    case KernelKind::gaussian_smeared_3d: {
      const double r0 = kernel.smearing;
      return 4.0 * std::numbers::pi / k2 * std::exp(-2.0 * k2 * r0 * r0);
    }
  }
  return 0.0;
}

namespace {

struct ImageCorrection {
  double offset = 0.0;     // constant added to the periodic potential
  double curvature = 0.0;  // coefficient of |r - r_c|^2
  std::array<double, 3> centre{};
  double energy_shift = 0.0;
};

// G_periodic(r) = 1/r - alpha/L + (2 pi / 3V) r^2 + O(r^4 / L^5) near the
// source, so the isolated potential of a compact density is recovered by
// subtracting the constant and quadratic background terms.
ImageCorrection image_correction(const Grid& grid, std::span<const double> density, double kappa) {
  ImageCorrection ic;
  const auto mom = density_moments(grid, density);
  ic.centre = mom.centre;
  const double var = mom.width * mom.width;
  const double length = grid.box_length();
  ic.curvature = 2.0 * std::numbers::pi * kappa / (3.0 * grid.box_volume());
  ic.offset = -kappa * kCubicMadelung / length + ic.curvature * var;
  ic.energy_shift = -kappa * kCubicMadelung / (2.0 * length) + ic.curvature * var;
  return ic;
}

}  // namespace

PoissonSolver::PoissonSolver(const Grid& grid, KernelSpec kernel)
    : grid_(grid), kernel_(kernel), fft_(grid.dimension(), grid.points_per_axis()) {
  kernel_.validate(grid_);
  correct_ = kernel_.image_correction && kernel_.dimension() == 3;
  symbol_.resize(grid_.size());
  for (std::size_t i = 0; i < symbol_.size(); ++i) symbol_[i] = kernel_symbol(kernel_, grid_.k_squared(i));
}

RealField PoissonSolver::periodic_potential(std::span<const double> density, double kappa) const {
  if (density.size() != grid_.size()) throw InvalidArgument("density size does not match grid");
  ComplexField work(density.begin(), density.end());
  fft_.forward(work);
  for (std::size_t i = 0; i < work.size(); ++i) work[i] *= -kappa * symbol_[i];
  fft_.inverse(work);
  RealField phi(work.size());
  for (std::size_t i = 0; i < work.size(); ++i) phi[i] = work[i].real();
  return phi;
}

RealField PoissonSolver::potential(std::span<const double> density, double kappa) const {
  RealField phi = periodic_potential(density, kappa);
  if (!correct_ || kappa == 0.0) return phi;
  const auto ic = image_correction(grid_, density, kappa);
  const auto x = grid_.coordinates();
  const auto n = x.size();
  std::array<std::vector<double>, 3> q;
  for (std::size_t a = 0; a < 3; ++a) {
    q[a].resize(n);
    for (std::size_t j = 0; j < n; ++j) q[a][j] = ic.curvature * (x[j] - ic.centre[a]) * (x[j] - ic.centre[a]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double* row = phi.data() + (i * n + j) * n;
      const double base = ic.offset + q[0][i] + q[1][j];
      for (std::size_t k = 0; k < n; ++k) row[k] += base + q[2][k];
    }
  }
  return phi;
}

double PoissonSolver::interaction_energy(std::span<const double> density, double kappa) const {
  const RealField phi = periodic_potential(density, kappa);
  double w = 0.5 * pairwise_sum<double>(phi.size(), [&](std::size_t i) { return phi[i] * density[i]; }) *
             grid_.cell_volume();
  if (correct_ && kappa != 0.0) w += image_correction(grid_, density, kappa).energy_shift;
  return w;
}

RealField potential_from_density(const Grid& grid, std::span<const double> density,
                                 const KernelSpec& kernel, double kappa) {
  kernel.validate(grid);
  if (density.size() != grid.size()) throw InvalidArgument("density size does not match grid");
  double mass = 0.0;
  for (double v : density) {
    if (v < 0.0) throw ContractViolation("density must be non-negative");
  }
  mass = pairwise_sum<double>(density.size(), [&](std::size_t i) { return density[i]; }) *
         grid.cell_volume();
  if (std::abs(mass - 1.0) > 1e-6) {
    throw ContractViolation("density integrates to " + std::to_string(mass) + ", expected 1");
  }
  return PoissonSolver(grid, kernel).periodic_potential(density, kappa);
}

KineticPropagator::KineticPropagator(const Grid& grid, std::complex<double> z)
    : grid_(grid), fft_(grid.dimension(), grid.points_per_axis()) {
  factor_.resize(grid_.size());
  for (std::size_t i = 0; i < factor_.size(); ++i) factor_[i] = std::exp(-z * 0.5 * grid_.k_squared(i));
  if (grid_.dimension() == 1) {
    const auto n = static_cast<std::size_t>(grid_.points_per_axis());
    pair_fft_.emplace(2, grid_.points_per_axis());
    pair_factor_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double k1 = grid_.wavenumbers()[i];
        const double k2 = grid_.wavenumbers()[j];
        pair_factor_[i * n + j] = std::exp(-z * 0.5 * (k1 * k1 + k2 * k2));
      }
    }
  }
}

void KineticPropagator::apply(std::span<Complex> field) const {
  if (field.size() != factor_.size()) throw InvalidArgument("field size does not match grid");
  fft_.forward(field);
  for (std::size_t i = 0; i < field.size(); ++i) field[i] *= factor_[i];
  fft_.inverse(field);
}

void KineticPropagator::apply_pair(std::span<Complex> field) const {
  if (!pair_fft_ || field.size() != pair_factor_.size()) {
    throw InvalidArgument("two-particle field does not match the 1D grid");
  }
  pair_fft_->forward(field);
  for (std::size_t i = 0; i < field.size(); ++i) field[i] *= pair_factor_[i];
  pair_fft_->inverse(field);
}

WaveFunction kinetic_half_step(const WaveFunction& state, double dt) {
  WaveFunction out = state;
  KineticPropagator(state.grid(), Complex(0.0, 0.5 * dt)).apply(out.data());
  return out;
}

double kinetic_energy(const Grid& grid, std::span<const Complex> field) {
  if (field.size() != grid.size()) throw InvalidArgument("field size does not match grid");
  ComplexField work(field.begin(), field.end());
  Fft(grid.dimension(), grid.points_per_axis()).forward(work);
  const double s = pairwise_sum<double>(work.size(), [&](std::size_t i) {
    return grid.k_squared(i) * std::norm(work[i]);
  });
  return 0.5 * s * grid.cell_volume() / static_cast<double>(grid.size());
}

namespace {

// exp(-i k.x_j) = exp(-2 pi i j m / n) * (-1)^m because x_j = (j - n/2) h.
double index_sign(const Grid& grid, std::size_t flat) {
  const auto idx = grid.unflatten(flat);
  return ((idx[0] + idx[1] + idx[2]) % 2 == 0) ? 1.0 : -1.0;
}

void require_3d(const Grid& grid) {
  if (grid.dimension() != 3) throw InvalidArgument("the k-space operator form needs a 3D grid");
}

}  // namespace

ComplexField mode_expectations(const WaveFunction& state) {
  const Grid& grid = state.grid();
  require_3d(grid);
  const RealField rho = state.density();
  ComplexField ex(rho.begin(), rho.end());
  Fft(3, grid.points_per_axis()).forward(ex);
  for (std::size_t i = 0; i < ex.size(); ++i) {
    const double k2 = grid.k_squared(i);
    ex[i] = k2 > 0.0 ? ex[i] * grid.cell_volume() * index_sign(grid, i) / std::sqrt(k2) : Complex{};
  }
  return ex;
}

ComplexField kspace_nonlinear_term(const WaveFunction& state, double kappa) {
  const Grid& grid = state.grid();
  require_3d(grid);
  ComplexField sum = mode_expectations(state);
  const double w = std::pow(2.0 * std::numbers::pi / grid.box_length(), 3);
  for (std::size_t i = 0; i < sum.size(); ++i) {
    const double k2 = grid.k_squared(i);
    if (k2 > 0.0) sum[i] *= w * index_sign(grid, i) / std::sqrt(k2);
  }
  // sum_m X_m exp(2 pi i j m / n) = N * IFFT(X)_j
  Fft(3, grid.points_per_axis()).inverse(sum);
  const double scale = -kappa / (2.0 * std::numbers::pi * std::numbers::pi) * static_cast<double>(grid.size());
  ComplexField out(sum.size());
  const auto psi = state.amplitudes();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scale * sum[i] * psi[i];
  return out;
}

}  // namespace snlab
