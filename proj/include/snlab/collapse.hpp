#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "snlab/constants.hpp"
#include "snlab/state.hpp"
#include "snlab/units.hpp"

namespace snlab {

/// Density matrix over the sites of a 1D grid, normalized as sum_i rho_ii = 1
/// (site basis, no cell measure).
class DensityMatrix {
 public:
  DensityMatrix(Grid grid, Eigen::MatrixXcd matrix);

  /// |psi><psi| with psi_i * sqrt(h) as site amplitudes.
  static DensityMatrix pure(const WaveFunction& state);

  const Grid& grid() const noexcept { return grid_; }
  const Eigen::MatrixXcd& matrix() const noexcept { return matrix_; }

  std::complex<double> trace() const { return matrix_.trace(); }
  double purity() const { return (matrix_ * matrix_).trace().real(); }
  double min_eigenvalue() const;
  /// Throws ContractViolation when Hermiticity (1e-10), trace (1e-9) or
  /// positivity (-1e-8) fails.
  void validate() const;

 private:
  Grid grid_;
  Eigen::MatrixXcd matrix_;
};

/// Sum of |eigenvalues| of a - b.
double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Gaussian cutoff profile exp(-k^2 R0^2); r0 in internal length units.
struct CutoffSpec {
  double r0 = 1.0;

  double profile(double k) const;
};

/// Lindblad operators that are all diagonal in the site basis, stored as their
/// diagonals. The dissipator is gamma * sum_a weight_a (L_a rho L_a^dag - 1/2 {L_a^dag L_a, rho}).
struct LindbladFamily {
  Grid grid;
  double gamma = 0.0;
  std::vector<ComplexField> diagonals;
  std::vector<double> weights;
  std::vector<double> wavenumbers;  // mode families only
  bool hermitian = false;

  std::size_t size() const noexcept { return diagonals.size(); }
  Eigen::MatrixXcd operator_matrix(std::size_t a) const;
};

/// Both representations of the cut-off Diosi family on a 1D grid.
struct DiosiFamilies {
  /// L(k) = profile(k) exp(i k x) / |k| over the nonzero wavenumbers, weight 2 pi / box.
  LindbladFamily modes;
  /// M_m = f(x - y_m) on every site y_m, with f the real even function whose
  /// squared Fourier coefficients reproduce the mode weights; same dissipator.
  LindbladFamily hermitian;
};

/// Throws ResolutionError when r0 is below the grid spacing and
/// InvalidArgument for a non-1D grid or more than 64 sites.
DiosiFamilies diosi_operators(const Grid& grid, const CutoffSpec& cutoff, double gamma);

/// Dimensionless Diosi coupling kappa / (2 pi^2) (hbar = m = 1).
double diosi_gamma(const UnitSystem& units);
/// G / (2 pi^2 hbar) in SI.
double diosi_gamma_si(const PhysicalConstants& pc = PhysicalConstants::codata2018());

/// Hermitian family built from arbitrary real diagonals (projectors, identity).
LindbladFamily hermitian_family(const Grid& grid, std::vector<RealField> diagonals, double gamma);

/// Gamma_ij such that the dissipator equals Gamma o rho (elementwise).
Eigen::MatrixXcd dephasing_rates(const LindbladFamily& family);

/// Dissipator evaluated by explicit operator products.
Eigen::MatrixXcd dissipator(const LindbladFamily& family, const Eigen::MatrixXcd& rho);

/// -1/2 Laplacian on the periodic grid, exact spectral form, site basis.
Eigen::MatrixXcd free_hamiltonian(const Grid& grid);

struct LindbladStepReport {
  double trace_drift = 0.0;
  double min_eigenvalue = 0.0;
  bool positivity_warning = false;  // min eigenvalue below -1e-8
};

/// One RK4 step of d rho/dt = -i[H, rho] + D[rho]. Throws StepSizeError when
/// |Tr rho - 1| exceeds 1e-8 afterwards.
DensityMatrix lindblad_step(const DensityMatrix& rho, const LindbladFamily& family,
                            const Eigen::MatrixXcd& hamiltonian, double dt,
                            LindbladStepReport* report = nullptr);

/// Repeated lindblad_step with the dephasing rates computed once.
class LindbladIntegrator {
 public:
  LindbladIntegrator(const LindbladFamily& family, Eigen::MatrixXcd hamiltonian);
  DensityMatrix step(const DensityMatrix& rho, double dt, LindbladStepReport* report = nullptr) const;
  DensityMatrix evolve(DensityMatrix rho, double dt, long steps, long* warnings = nullptr) const;

 private:
  Eigen::MatrixXcd derivative(const Eigen::MatrixXcd& rho) const;

  Grid grid_;
  Eigen::MatrixXcd hamiltonian_;
  Eigen::MatrixXcd rates_;
};

struct TrajectoryConfig {
  double dt = 1e-3;
  long steps = 1;
  std::uint64_t seed = 0;
  long ensemble_size = 1;
  long record_every = 0;  // 0 records the final state only

  /// Throws InvalidArgument unless dt > 0, steps >= 1, ensemble_size >= 1.
  void validate() const;
};

/// Seed of trajectory `index` derived from the master seed by splitmix64.
std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index);

/// Ito Euler-Maruyama integrator for the stochastic collapse equation with a
/// Hermitian family: exact unitary step exp(-i H dt), then
///   psi_j *= 1 + sqrt(gamma) sum_a sqrt(w_a) (f_a(j) - l_a) dW_a
///              - gamma/2 sum_a w_a (f_a(j) - l_a)^2 dt,
/// l_a = <f_a>, followed by renormalization.
class SseIntegrator {
 public:
  SseIntegrator(const LindbladFamily& family, const Eigen::MatrixXcd& hamiltonian, double dt);

  double dt() const noexcept { return dt_; }
  std::size_t operator_count() const noexcept { return diagonals_.size(); }
  /// Advances psi (site amplitudes with cell measure, norm 1) with the given
  /// increments dW (one per operator, variance dt). Returns the squared norm
  /// before renormalization.
  double step(ComplexField& psi, std::span<const double> dw) const;

 private:
  Grid grid_;
  double dt_;
  double gamma_;
  Eigen::MatrixXcd unitary_;
  std::vector<RealField> diagonals_;  // sqrt(w_a) f_a
};

struct Trajectory {
  std::vector<double> times;
  std::vector<WaveFunction> states;
  std::vector<double> prenormalization_norms;  // squared norm before each renormalization
};

/// Throws NumericalBlowup with step and seed on non-finite amplitudes.
Trajectory sse_trajectory(const WaveFunction& psi0, const LindbladFamily& family,
                          const Eigen::MatrixXcd& hamiltonian, const TrajectoryConfig& cfg);

struct EnsembleResult {
  DensityMatrix mean_state;          // average of |psi><psi| at the final time
  std::vector<double> final_weights;  // per trajectory: <P> of the first operator at the end
  double prenorm_mean = 0.0;          // mean of (|psi|^2 - 1) before renormalization
  double prenorm_stderr = 0.0;
  /// With cfg.record_every > 0: times and mean states at steps 0, record_every, ...
  std::vector<double> times;
  std::vector<Eigen::MatrixXcd> recorded;
};

/// Runs cfg.ensemble_size trajectories with seeds trajectory_seed(cfg.seed, i)
/// and reduces them in index order in fixed-size chunks, so the result does not
/// depend on `workers`.
EnsembleResult sse_ensemble(const WaveFunction& psi0, const LindbladFamily& family,
                            const Eigen::MatrixXcd& hamiltonian, const TrajectoryConfig& cfg,
                            int workers = 1);

/// Terms of the stochastic collapse equation for the unsmeared operator family
/// L(k) = exp(i k.r) / |k| on a 3D grid, together with the Schroedinger-Newton
/// term of the operator form. Sums over k use the weight (2 pi / box)^3 and omit k = 0.
struct DriftDecomposition {
  double gamma = 0.0;
  double kappa_sn = 0.0;
  ComplexField hamiltonian;          // -i H psi, H = kinetic energy
  ComplexField deterministic_drift;  // -(gamma/2) sum w (L^dag L - 2 l L + l^2) psi
  /// Extra terms from xi -> xi' + i sqrt(gamma) <L^dag> in sqrt(gamma) sum w (L - l) xi psi:
  ComplexField substitution_operator;  // i gamma sum w <L^dag> L psi
  ComplexField substitution_scalar;    // -i gamma (sum w l <L^dag>) psi
  /// i kappa_sn / (2 pi^2) sum w <L^dag> L psi, from the spectral operator route.
  ComplexField sn_term;
  /// Re<sn_term, substitution_operator> / <sn_term, sn_term>; NaN if sn_term is zero.
  double coefficient_ratio = 0.0;
  /// gamma / (kappa_sn / (2 pi^2)).
  double nominal_ratio = 0.0;
  /// ||substitution_operator - sn_term|| / ||sn_term||; NaN if sn_term is zero.
  double field_discrepancy = 0.0;
};

/// kappa_sn < 0 selects 2 pi^2 gamma, the value for which the substitution
/// reproduces the operator form exactly.
DriftDecomposition drift_decomposition(const WaveFunction& state, double gamma, double kappa_sn = -1.0);

struct HeatingRate {
  double joules_per_second = 0.0;
  double kelvin_per_second = 0.0;  // E = kB T
};

/// Energy production Tr(H D[rho]) of the cut-off Diosi model with H = p^2 / 2m:
///   dE/dt = G m hbar (pi/2)^{3/2} / (4 pi^2 R0^3), independent of the state.
HeatingRate heating_rate(double mass_kg, double r0_m,
                         const PhysicalConstants& pc = PhysicalConstants::codata2018());

/// Same quantity in internal units (hbar = m = 1): (gamma / 2) (pi/2)^{3/2} / R0^3.
double heating_rate_dimensionless(double gamma, double r0);

}  // namespace snlab
