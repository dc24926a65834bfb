#include "snlab/spinor.hpp"

#include <cmath>
#include <numbers>

#include "snlab/errors.hpp"
#include "snlab/summation.hpp"

namespace snlab {

std::string to_string(SpinorCoupling coupling) {
  return coupling == SpinorCoupling::shared ? "shared" : "separate";
}

SpinorStepper::SpinorStepper(const Grid& grid, const EvolutionConfig& cfg, SpinorCoupling coupling)
    : cfg_(cfg),
      coupling_(coupling),
      solver_(grid, cfg.kernel.dimension() == grid.dimension() ? cfg.kernel : KernelSpec::default_for(grid)),
      half_kinetic_(grid, Complex(0.0, 0.5 * cfg.dt)) {
  cfg_.validate();
}

void SpinorStepper::apply_phase(ComplexField& field, const RealField& phi) const {
  for (std::size_t i = 0; i < field.size(); ++i) {
    field[i] *= Complex(std::cos(phi[i] * cfg_.dt), -std::sin(phi[i] * cfg_.dt));
  }
}

namespace {

RealField density_of(const ComplexField& f, double scale) {
  RealField rho(f.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = scale * std::norm(f[i]);
  return rho;
}

}  // namespace

void SpinorStepper::step(SpinorWaveFunction& state, long step_index) const {
  if (!(state.grid() == solver_.grid())) throw InvalidArgument("spinor grid does not match stepper");
  ComplexField& plus = state.plus_data();
  ComplexField& minus = state.minus_data();
  half_kinetic_.apply(plus);
  half_kinetic_.apply(minus);
  if (cfg_.mode != EvolutionMode::free && cfg_.kappa != 0.0) {
    if (coupling_ == SpinorCoupling::shared) {
      RealField rho = density_of(plus, 1.0);
      for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += std::norm(minus[i]);
      const RealField phi = solver_.potential(rho, cfg_.kappa);
      apply_phase(plus, phi);
      apply_phase(minus, phi);
    } else {
      const double np = state.plus_norm();
      const double nm = state.minus_norm();
      if (np > 0.0) apply_phase(plus, solver_.potential(density_of(plus, 1.0 / np), cfg_.kappa));
      if (nm > 0.0) apply_phase(minus, solver_.potential(density_of(minus, 1.0 / nm), cfg_.kappa));
    }
  }
  half_kinetic_.apply(plus);
  half_kinetic_.apply(minus);
  check_finite(plus, step_index);
  check_finite(minus, step_index);
}

SpinorWaveFunction step_spinor(const SpinorWaveFunction& state, const EvolutionConfig& cfg,
                               SpinorCoupling coupling, long step_index) {
  const SpinorStepper stepper(state.grid(), cfg, coupling);
  SpinorWaveFunction out = state;
  stepper.step(out, step_index);
  return out;
}

namespace {

double mean_position(const Grid& grid, std::span<const Complex> f, int axis) {
  const auto ua = static_cast<std::size_t>(axis);
  const double w = pairwise_sum<double>(f.size(), [&](std::size_t i) { return std::norm(f[i]); });
  const double s = pairwise_sum<double>(f.size(), [&](std::size_t i) {
    // the edge point -L/2 sits midway between its periodic images
    return grid.unflatten(i)[ua] == 0 ? 0.0 : std::norm(f[i]) * grid.position(i)[ua];
  });
  return w > 0.0 ? s / w : 0.0;
}

}  // namespace

SpinorDiagnostics spinor_diagnostics(const SpinorWaveFunction& state, const PoissonSolver& solver,
                                     double kappa, SpinorCoupling coupling, int axis, double time) {
  const Grid& grid = state.grid();
  if (axis < 0 || axis >= grid.dimension()) throw InvalidArgument("axis out of range");
  SpinorDiagnostics d;
  d.time = time;
  d.plus_norm = state.plus_norm();
  d.minus_norm = state.minus_norm();
  d.kinetic_energy = kinetic_energy(grid, state.plus()) + kinetic_energy(grid, state.minus());
  if (kappa != 0.0) {
    if (coupling == SpinorCoupling::shared) {
      RealField rho(grid.size());
      for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(state.plus()[i]) + std::norm(state.minus()[i]);
      d.gravitational_energy = solver.interaction_energy(rho, kappa);
    } else {
      auto part = [&](std::span<const Complex> f, double n) {
        if (!(n > 0.0)) return 0.0;
        RealField rho(f.size());
        for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(f[i]) / n;
        return n * solver.interaction_energy(rho, kappa);
      };
      d.gravitational_energy = part(state.plus(), d.plus_norm) + part(state.minus(), d.minus_norm);
    }
  }
  d.total_energy = d.kinetic_energy + d.gravitational_energy;
  d.plus_position = mean_position(grid, state.plus(), axis);
  d.minus_position = mean_position(grid, state.minus(), axis);
  d.half_separation = 0.5 * (d.plus_position - d.minus_position);
  return d;
}

SpinorWaveFunction make_split_spinor(const WaveFunction& phi, double k, int axis) {
  const Grid& grid = phi.grid();
  if (axis < 0 || axis >= grid.dimension()) throw InvalidArgument("axis out of range");
  const auto ua = static_cast<std::size_t>(axis);
  ComplexField plus(grid.size());
  ComplexField minus(grid.size());
  const double s = 1.0 / std::numbers::sqrt2;
  for (std::size_t i = 0; i < plus.size(); ++i) {
    const double z = grid.position(i)[ua];
    const Complex e(std::cos(k * z), std::sin(k * z));
    plus[i] = s * e * phi.amplitudes()[i];
    minus[i] = s * std::conj(e) * phi.amplitudes()[i];
  }
  return SpinorWaveFunction::normalized(grid, std::move(plus), std::move(minus));
}

}  // namespace snlab
