#pragma once

#include <functional>
#include <string>
#include <vector>

#include "snlab/diagnostics.hpp"
#include "snlab/spectral.hpp"
#include "snlab/state.hpp"

namespace snlab {

/// sn: self-consistent potential of the state's own density.
/// free: no potential.
/// hartree_linear: the mean-field equation of the linear N-body problem; for a
/// single scalar field it is formally the same equation as sn.
enum class EvolutionMode { sn, free, hartree_linear };

std::string to_string(EvolutionMode mode);
EvolutionMode evolution_mode_from_string(const std::string& name);

struct EvolutionConfig {
  double dt = 0.01;
  long steps = 1;
  double kappa = 0.0;
  KernelSpec kernel;
  long record_every = 1;
  EvolutionMode mode = EvolutionMode::sn;

  /// Throws InvalidArgument unless dt > 0, steps >= 1 and record_every >= 1.
  void validate() const;
};

/// Strang splitting for one scalar field with cached propagators: half kinetic
/// step, potential phase from the density after that half step, half kinetic step.
class ScalarStepper {
 public:
  ScalarStepper(const Grid& grid, const EvolutionConfig& cfg);

  const PoissonSolver& solver() const noexcept { return solver_; }
  const EvolutionConfig& config() const noexcept { return cfg_; }

  /// Advances `field` in place. `step_index` labels a NumericalBlowup.
  void step(ComplexField& field, long step_index = 0) const;

 private:
  EvolutionConfig cfg_;
  Grid grid_;
  PoissonSolver solver_;
  KineticPropagator half_kinetic_;
};

/// Throws NumericalBlowup naming `step_index` if any amplitude is not finite.
void check_finite(std::span<const Complex> field, long step_index);

WaveFunction step_sn(const WaveFunction& state, const EvolutionConfig& cfg, long step_index = 0);

struct Evolution {
  std::vector<DiagnosticsRecord> records;
  WaveFunction final_state;
};

/// Called on every recorded state to add extra observables (packet positions).
using RecordHook = std::function<void(const WaveFunction&, DiagnosticsRecord&)>;

/// Records diagnostics at step 0 and every record_every steps up to cfg.steps,
/// so records.size() == steps / record_every + 1.
Evolution evolve(const WaveFunction& initial, const EvolutionConfig& cfg, const RecordHook& hook = {});

struct GroundStateOptions {
  /// Relative energy change per step and relative stationarity residual
  /// ||psi_{n+1} - psi_n|| / (dtau |mu|) must both fall below tolerance.
  double tolerance = 1e-6;
  double dtau = 0.0;          // 0 selects 0.4 / kappa^2
  double initial_width = 0.0;  // 0 selects 3 / kappa per axis
  long max_iterations = 50000;
  KernelSpec kernel;          // defaults to newtonian_3d with image correction
};

struct GroundStateResult {
  WaveFunction state;
  DiagnosticsRecord diagnostics;
  double chemical_potential = 0.0;
  double residual = 0.0;
  long iterations = 0;
};

/// Imaginary-time propagation (dt -> -i dtau) with renormalization each step.
/// The potential of each step is built from the density at the start of the
/// step. Throws ConvergenceError carrying the last residual when
/// max_iterations is reached.
GroundStateResult find_ground_state(const Grid& grid, double kappa, const GroundStateOptions& options);

WaveFunction ground_state(const Grid& grid, double kappa, double tol);

/// ||(H - mu) psi|| / |mu| with mu = <psi|H|psi>, H = k^2/2 + Phi.
double eigen_residual(const WaveFunction& state, const PoissonSolver& solver, double kappa,
                      double* chemical_potential = nullptr);

}  // namespace snlab
