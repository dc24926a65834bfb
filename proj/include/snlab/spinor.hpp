#pragma once

#include <string>

#include "snlab/dynamics.hpp"

namespace snlab {

/// separate: each component moves in the potential of its own density scaled
/// to unit mass, as if the particle were in that spin eigenstate.
/// shared: both components move in the potential of the total density
/// |plus|^2 + |minus|^2, so the two halves attract each other.
enum class SpinorCoupling { separate, shared };

std::string to_string(SpinorCoupling coupling);

class SpinorStepper {
 public:
  SpinorStepper(const Grid& grid, const EvolutionConfig& cfg, SpinorCoupling coupling);

  const PoissonSolver& solver() const noexcept { return solver_; }
  void step(SpinorWaveFunction& state, long step_index = 0) const;

 private:
  void apply_phase(ComplexField& field, const RealField& phi) const;

  EvolutionConfig cfg_;
  SpinorCoupling coupling_;
  PoissonSolver solver_;
  KineticPropagator half_kinetic_;
};

SpinorWaveFunction step_spinor(const SpinorWaveFunction& state, const EvolutionConfig& cfg,
                               SpinorCoupling coupling, long step_index = 0);

struct SpinorDiagnostics {
  double time = 0.0;
  double plus_norm = 0.0;
  double minus_norm = 0.0;
  double kinetic_energy = 0.0;
  double gravitational_energy = 0.0;
  double total_energy = 0.0;
  double plus_position = 0.0;   // density-weighted mean of the plus component along `axis`
  double minus_position = 0.0;
  double half_separation = 0.0;  // (plus_position - minus_position) / 2
};

/// Energy consistent with the chosen coupling: the shared functional of the
/// total density, or the norm-weighted sum of the separate per-component energies.
SpinorDiagnostics spinor_diagnostics(const SpinorWaveFunction& state, const PoissonSolver& solver,
                                     double kappa, SpinorCoupling coupling, int axis, double time = 0.0);

/// plus = exp(+i k z) phi / sqrt(2), minus = exp(-i k z) phi / sqrt(2), z along `axis`.
SpinorWaveFunction make_split_spinor(const WaveFunction& phi, double k, int axis);

}  // namespace snlab
