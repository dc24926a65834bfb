#include "snlab/dynamics.hpp"

#include <cmath>
#include <string>

#include "snlab/errors.hpp"
#include "snlab/summation.hpp"

namespace snlab {

std::string to_string(EvolutionMode mode) {
  switch (mode) {
    case EvolutionMode::sn: return "sn";
    case EvolutionMode::free: return "free";
    case EvolutionMode::hartree_linear: return "hartree_linear";
  }
  return "unknown";
}

EvolutionMode evolution_mode_from_string(const std::string& name) {
  if (name == "sn") return EvolutionMode::sn;
  if (name == "free") return EvolutionMode::free;
  if (name == "hartree_linear") return EvolutionMode::hartree_linear;
  throw InvalidArgument("unknown evolution mode '" + name + "'");
}

void EvolutionConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
  if (steps < 1) throw InvalidArgument("steps must be at least 1");
  if (record_every < 1) throw InvalidArgument("record_every must be at least 1");
  if (!std::isfinite(kappa) || kappa < 0.0) throw InvalidArgument("kappa must be finite and non-negative");
}

namespace {

// The kernel is irrelevant for free evolution; fall back to one that fits the grid.
KernelSpec effective_kernel(const Grid& grid, const EvolutionConfig& cfg) {
  if (cfg.mode == EvolutionMode::free && cfg.kernel.dimension() != grid.dimension()) {
    return KernelSpec::default_for(grid);
  }
  return cfg.kernel;
}

}  // namespace

ScalarStepper::ScalarStepper(const Grid& grid, const EvolutionConfig& cfg)
    : cfg_(cfg),
      grid_(grid),
      solver_(grid, effective_kernel(grid, cfg)),
      half_kinetic_(grid, Complex(0.0, 0.5 * cfg.dt)) {
  cfg_.validate();
}

void check_finite(std::span<const Complex> field, long step_index) {
  for (const auto& v : field) {
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw NumericalBlowup(step_index, "non-finite amplitude");
    }
  }
}

void ScalarStepper::step(ComplexField& field, long step_index) const {
  half_kinetic_.apply(field);
  if (cfg_.mode != EvolutionMode::free && cfg_.kappa != 0.0) {
    RealField rho(field.size());
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(field[i]);
    const RealField phi = solver_.potential(rho, cfg_.kappa);
    for (std::size_t i = 0; i < field.size(); ++i) {
      field[i] *= Complex(std::cos(phi[i] * cfg_.dt), -std::sin(phi[i] * cfg_.dt));
    }
  }
  half_kinetic_.apply(field);
  check_finite(field, step_index);
}

WaveFunction step_sn(const WaveFunction& state, const EvolutionConfig& cfg, long step_index) {
  const ScalarStepper stepper(state.grid(), cfg);
  WaveFunction out = state;
  stepper.step(out.data(), step_index);
  return out;
}

Evolution evolve(const WaveFunction& initial, const EvolutionConfig& cfg, const RecordHook& hook) {
  const ScalarStepper stepper(initial.grid(), cfg);
  const double kappa = cfg.mode == EvolutionMode::free ? 0.0 : cfg.kappa;
  Evolution ev{{}, initial};
  auto record = [&](long step) {
    DiagnosticsRecord rec =
        diagnostics(ev.final_state, stepper.solver(), kappa, static_cast<double>(step) * cfg.dt);
    if (hook) hook(ev.final_state, rec);
    ev.records.push_back(std::move(rec));
  };
  ev.records.reserve(static_cast<std::size_t>(cfg.steps / cfg.record_every + 1));
  record(0);
  for (long s = 1; s <= cfg.steps; ++s) {
    stepper.step(ev.final_state.data(), s);
    if (s % cfg.record_every == 0) record(s);
  }
  return ev;
}

double eigen_residual(const WaveFunction& state, const PoissonSolver& solver, double kappa,
                      double* chemical_potential) {
  const Grid& grid = state.grid();
  const auto psi = state.amplitudes();
  ComplexField hpsi(psi.begin(), psi.end());
  const Fft& fft = solver.fft();
  fft.forward(hpsi);
  for (std::size_t i = 0; i < hpsi.size(); ++i) hpsi[i] *= 0.5 * grid.k_squared(i);
  fft.inverse(hpsi);
  const RealField phi = solver.potential(state.density(), kappa);
  for (std::size_t i = 0; i < hpsi.size(); ++i) hpsi[i] += phi[i] * psi[i];
  const double dv = grid.cell_volume();
  const double mu = pairwise_sum<double>(psi.size(), [&](std::size_t i) {
                      return (std::conj(psi[i]) * hpsi[i]).real();
                    }) * dv;
  const double r2 = pairwise_sum<double>(psi.size(), [&](std::size_t i) {
                      return std::norm(hpsi[i] - mu * psi[i]);
                    }) * dv;
  if (chemical_potential) *chemical_potential = mu;
  return std::sqrt(r2) / std::abs(mu);
}

GroundStateResult find_ground_state(const Grid& grid, double kappa, const GroundStateOptions& options) {
  if (!(kappa > 0.0)) throw InvalidArgument("ground state needs kappa > 0");
  if (!(options.tolerance > 0.0)) throw InvalidArgument("tolerance must be positive");
  KernelSpec kernel = options.kernel;
  if (grid.dimension() == 1 && kernel.kind == KernelKind::newtonian_3d) kernel = KernelSpec::default_for(grid);
  const PoissonSolver solver(grid, kernel);
  const double dtau = options.dtau > 0.0 ? options.dtau : 0.4 / (kappa * kappa);
  const double width = options.initial_width > 0.0 ? options.initial_width : 3.0 / kappa;
  const KineticPropagator half_kinetic(grid, Complex(0.5 * dtau, 0.0));

  WaveFunction psi = make_gaussian(grid, width);
  const double dv = grid.cell_volume();
  double energy = diagnostics(psi, solver, kappa).total_energy;
  double stationarity = 1.0;
  constexpr long kCheckEvery = 10;
  for (long it = 1; it <= options.max_iterations; ++it) {
    const bool check = it % kCheckEvery == 0;
    ComplexField previous;
    if (check) previous.assign(psi.amplitudes().begin(), psi.amplitudes().end());
    const RealField phi = solver.potential(psi.density(), kappa);
    ComplexField& f = psi.data();
    half_kinetic.apply(f);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::exp(-phi[i] * dtau);
    half_kinetic.apply(f);
    check_finite(f, it);
    psi.renormalize();
    if (!check) continue;

    const DiagnosticsRecord rec = diagnostics(psi, solver, kappa);
    // energy change per step, averaged over the check interval
    const double change =
        std::abs(rec.total_energy - energy) / (kCheckEvery * std::abs(rec.total_energy));
    energy = rec.total_energy;
    const double diff = pairwise_sum<double>(f.size(), [&](std::size_t i) {
                          return std::norm(f[i] - previous[i]);
                        }) * dv;
    double mu = 0.0;
    eigen_residual(psi, solver, kappa, &mu);
    stationarity = std::sqrt(diff) / (dtau * std::abs(mu));
    if (change < options.tolerance && stationarity < options.tolerance) {
      GroundStateResult result{psi, rec, mu, stationarity, it};
      return result;
    }
  }
  throw ConvergenceError(stationarity, "imaginary-time iteration did not converge in " +
                                           std::to_string(options.max_iterations) +
                                           " iterations (residual " + std::to_string(stationarity) + ")");
}

WaveFunction ground_state(const Grid& grid, double kappa, double tol) {
  GroundStateOptions options;
  options.tolerance = tol;
  return find_ground_state(grid, kappa, options).state;
}

}  // namespace snlab
