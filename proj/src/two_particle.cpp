#include "snlab/two_particle.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "snlab/errors.hpp"
#include "snlab/summation.hpp"

namespace snlab {

std::string to_string(TwoParticleInteraction interaction) {
  switch (interaction) {
    case TwoParticleInteraction::sn_selfconsistent: return "sn_selfconsistent";
    case TwoParticleInteraction::linear_pairwise: return "linear_pairwise";
    case TwoParticleInteraction::none: return "none";
  }
  return "unknown";
}

TwoParticleInteraction two_particle_interaction_from_string(const std::string& name) {
  if (name == "sn_selfconsistent") return TwoParticleInteraction::sn_selfconsistent;
  if (name == "linear_pairwise") return TwoParticleInteraction::linear_pairwise;
  if (name == "none") return TwoParticleInteraction::none;
  throw InvalidArgument("unknown two-particle interaction '" + name + "'");
}

TwoParticleStepper::TwoParticleStepper(const Grid& grid, const EvolutionConfig& cfg,
                                       TwoParticleInteraction interaction)
    : cfg_(cfg),
      interaction_(interaction),
      solver_(grid, cfg.kernel.dimension() == 1 ? cfg.kernel : KernelSpec::default_for(grid)),
      half_kinetic_(grid, Complex(0.0, 0.5 * cfg.dt)) {
  cfg_.validate();
  if (grid.dimension() != 1) throw InvalidArgument("two-particle evolution needs a 1D grid");
  if (grid.points_per_axis() > 256) throw InvalidArgument("two-particle grid limited to 256 points per axis");
  // sum_m rho_m K_{j-m} h = IFFT(symbol * FFT(rho))_j  =>  K = IFFT(symbol) / h
  ComplexField k(solver_.symbol().begin(), solver_.symbol().end());
  solver_.fft().inverse(k);
  pair_kernel_.resize(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) pair_kernel_[i] = k[i].real() / grid.spacing();
}

RealField TwoParticleStepper::potential(const TwoParticleWaveFunction& state) const {
  const auto n = static_cast<std::size_t>(state.grid().points_per_axis());
  RealField v(n * n, 0.0);
  if (cfg_.mode == EvolutionMode::free || cfg_.kappa == 0.0) return v;
  switch (interaction_) {
    case TwoParticleInteraction::none:
      break;
    case TwoParticleInteraction::sn_selfconsistent: {
      const auto marg = state.marginals();
      RealField rho(n);
      for (std::size_t i = 0; i < n; ++i) rho[i] = marg[0][i] + marg[1][i];
      const RealField phi = solver_.periodic_potential(rho, cfg_.kappa);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) v[i * n + j] = phi[i] + phi[j];
      }
      break;
    }
    case TwoParticleInteraction::linear_pairwise:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) v[i * n + j] = -2.0 * cfg_.kappa * pair_kernel_[(i + n - j) % n];
      }
      break;
  }
  return v;
}

void TwoParticleStepper::step(TwoParticleWaveFunction& state, long step_index) const {
  if (!(state.grid() == solver_.grid())) throw InvalidArgument("state grid does not match stepper");
  ComplexField& f = state.data();
  half_kinetic_.apply_pair(f);
  if (interaction_ != TwoParticleInteraction::none) {
    const RealField v = potential(state);
    for (std::size_t i = 0; i < f.size(); ++i) f[i] *= Complex(std::cos(v[i] * cfg_.dt), -std::sin(v[i] * cfg_.dt));
  }
  half_kinetic_.apply_pair(f);
  check_finite(f, step_index);
}

TwoParticleWaveFunction step_two_particle(const TwoParticleWaveFunction& state, const EvolutionConfig& cfg,
                                          TwoParticleInteraction interaction, long step_index) {
  const TwoParticleStepper stepper(state.grid(), cfg, interaction);
  TwoParticleWaveFunction out = state;
  stepper.step(out, step_index);
  return out;
}

TwoParticleDiagnostics two_particle_diagnostics(const TwoParticleWaveFunction& state,
                                                const TwoParticleStepper& stepper, double time) {
  const Grid& grid = state.grid();
  const auto n = static_cast<std::size_t>(grid.points_per_axis());
  const double h = grid.spacing();
  const double dv = h * h;
  const auto psi = state.amplitudes();
  TwoParticleDiagnostics d;
  d.time = time;
  d.norm = state.norm();

  ComplexField work(psi.begin(), psi.end());
  const Fft fft2(2, grid.points_per_axis());
  fft2.forward(work);
  const auto k = grid.wavenumbers();
  d.kinetic_energy = 0.5 * pairwise_sum<double>(work.size(), [&](std::size_t i) {
                       const double k1 = k[i / n];
                       const double k2 = k[i % n];
                       return (k1 * k1 + k2 * k2) * std::norm(work[i]);
                     }) * dv / static_cast<double>(work.size());

  const RealField v = stepper.potential(state);
  double e_int = pairwise_sum<double>(v.size(), [&](std::size_t i) { return v[i] * std::norm(psi[i]); }) * dv;
  // int V |Psi|^2 = int Phi rho_total; the conserved functional is half of it
  if (stepper.interaction() == TwoParticleInteraction::sn_selfconsistent) e_int *= 0.5;
  d.interaction_energy = e_int;
  d.total_energy = d.kinetic_energy + d.interaction_energy;

  const auto x = grid.coordinates();
  // first moments place the edge point -L/2 midway between its periodic images
  auto odd = [&](std::size_t j) { return j == 0 ? 0.0 : x[j]; };
  auto moment = [&](auto g, bool first) {
    return pairwise_sum<double>(psi.size(), [&](std::size_t i) {
             const double a = first ? odd(i / n) : x[i / n];
             const double b = first ? odd(i % n) : x[i % n];
             return g(a, b) * std::norm(psi[i]);
           }) * dv / d.norm;
  };
  d.com_mean = moment([](double a, double b) { return 0.5 * (a + b); }, true);
  const double com2 = moment([](double a, double b) { return 0.25 * (a + b) * (a + b); }, false);
  d.com_width = std::sqrt(std::max(0.0, com2 - d.com_mean * d.com_mean));
  const double rel1 = moment([](double a, double b) { return a - b; }, true);
  const double rel2 = moment([](double a, double b) { return (a - b) * (a - b); }, false);
  d.relative_width = std::sqrt(std::max(0.0, rel2 - rel1 * rel1));
  return d;
}

std::vector<double> schmidt_coefficients(const TwoParticleWaveFunction& state) {
  const auto n = static_cast<Eigen::Index>(state.grid().points_per_axis());
  Eigen::MatrixXcd m(n, n);
  const auto psi = state.amplitudes();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = psi[static_cast<std::size_t>(i * n + j)];
  }
  const Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  const Eigen::VectorXd s = svd.singularValues();
  const double total = std::sqrt(s.squaredNorm());
  std::vector<double> out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s(i) / total;
  return out;
}

int schmidt_rank(const TwoParticleWaveFunction& state, double threshold) {
  int r = 0;
  for (double s : schmidt_coefficients(state)) {
    if (s > threshold) ++r;
  }
  return r;
}

}  // namespace snlab
