#pragma once

#include <string>
#include <vector>

#include "snlab/dynamics.hpp"

namespace snlab {

/// sn_selfconsistent: V(x1, x2) = Phi(x1) + Phi(x2), Phi sourced by the sum of
/// both marginal densities; the double sum over particles includes i = j.
/// linear_pairwise: V(x1, x2) = -kappa * sum over ordered pairs i != j of
/// K(x_i - x_j) = -2 kappa K(x1 - x2), a fixed linear two-body potential.
/// none: free evolution of both particles.
enum class TwoParticleInteraction { sn_selfconsistent, linear_pairwise, none };

std::string to_string(TwoParticleInteraction interaction);
TwoParticleInteraction two_particle_interaction_from_string(const std::string& name);

class TwoParticleStepper {
 public:
  TwoParticleStepper(const Grid& grid, const EvolutionConfig& cfg, TwoParticleInteraction interaction);

  const PoissonSolver& solver() const noexcept { return solver_; }
  TwoParticleInteraction interaction() const noexcept { return interaction_; }
  /// Real-space periodic kernel K(m h) for m = 0..n-1 (zero mean).
  const RealField& pair_kernel() const noexcept { return pair_kernel_; }
  void step(TwoParticleWaveFunction& state, long step_index = 0) const;
  /// Potential on the n x n grid for the current state.
  RealField potential(const TwoParticleWaveFunction& state) const;

 private:
  EvolutionConfig cfg_;
  TwoParticleInteraction interaction_;
  PoissonSolver solver_;
  KineticPropagator half_kinetic_;
  RealField pair_kernel_;
};

TwoParticleWaveFunction step_two_particle(const TwoParticleWaveFunction& state, const EvolutionConfig& cfg,
                                          TwoParticleInteraction interaction, long step_index = 0);

struct TwoParticleDiagnostics {
  double time = 0.0;
  double norm = 0.0;
  double kinetic_energy = 0.0;
  double interaction_energy = 0.0;
  double total_energy = 0.0;
  double com_mean = 0.0;   // <(x1 + x2) / 2>
  double com_width = 0.0;  // rms spread of (x1 + x2) / 2
  double relative_width = 0.0;  // rms spread of x1 - x2
};

TwoParticleDiagnostics two_particle_diagnostics(const TwoParticleWaveFunction& state,
                                                const TwoParticleStepper& stepper, double time = 0.0);

/// Singular values of the amplitude matrix scaled so their squares sum to one.
std::vector<double> schmidt_coefficients(const TwoParticleWaveFunction& state);
/// Number of Schmidt coefficients above `threshold`.
int schmidt_rank(const TwoParticleWaveFunction& state, double threshold = 1e-8);

}  // namespace snlab
