#include "snlab/collapse.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>

#include "snlab/errors.hpp"
#include "snlab/fft.hpp"
#include "snlab/spectral.hpp"
#include "snlab/summation.hpp"

namespace snlab {

namespace {

constexpr double kPi = std::numbers::pi;

void require_site_grid(const Grid& grid) {
  if (grid.dimension() != 1) throw InvalidArgument("site-basis collapse dynamics need a 1D grid");
  if (grid.points_per_axis() > 64) throw InvalidArgument("site-basis collapse dynamics limited to 64 sites");
}

}  // namespace

DensityMatrix::DensityMatrix(Grid grid, Eigen::MatrixXcd matrix) : grid_(std::move(grid)), matrix_(std::move(matrix)) {
  require_site_grid(grid_);
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (matrix_.rows() != n || matrix_.cols() != n) throw InvalidArgument("density matrix shape does not match grid");
}

DensityMatrix DensityMatrix::pure(const WaveFunction& state) {
  const auto n = static_cast<Eigen::Index>(state.grid().size());
  Eigen::VectorXcd v(n);
  const double s = std::sqrt(state.grid().spacing());
  for (Eigen::Index i = 0; i < n; ++i) v(i) = s * state.amplitudes()[static_cast<std::size_t>(i)];
  return DensityMatrix(state.grid(), v * v.adjoint());
}

double DensityMatrix::min_eigenvalue() const {
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(matrix_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::validate() const {
  const double herm = (matrix_ - matrix_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > 1e-10) throw ContractViolation("density matrix not Hermitian (" + std::to_string(herm) + ")");
  const double tr = std::abs(trace() - 1.0);
  if (tr > 1e-9) throw ContractViolation("density matrix trace deviates by " + std::to_string(tr));
  const double lo = min_eigenvalue();
  if (lo < -1e-8) throw ContractViolation("density matrix eigenvalue " + std::to_string(lo));
}

double trace_distance(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  const Eigen::MatrixXcd d = a - b;
  const Eigen::MatrixXcd h = 0.5 * (d + d.adjoint());
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().sum();
}

double CutoffSpec::profile(double k) const { return std::exp(-k * k * r0 * r0); }

Eigen::MatrixXcd LindbladFamily::operator_matrix(std::size_t a) const {
  const ComplexField& d = diagonals.at(a);
  Eigen::VectorXcd v(static_cast<Eigen::Index>(d.size()));
  for (std::size_t i = 0; i < d.size(); ++i) v(static_cast<Eigen::Index>(i)) = d[i];
  return v.asDiagonal();
}

DiosiFamilies diosi_operators(const Grid& grid, const CutoffSpec& cutoff, double gamma) {
  require_site_grid(grid);
  if (!(cutoff.r0 > 0.0)) throw InvalidArgument("cutoff R0 must be positive");
  if (cutoff.r0 < grid.spacing()) {
    throw ResolutionError("cutoff R0 = " + std::to_string(cutoff.r0) + " is below the grid spacing " +
                          std::to_string(grid.spacing()));
  }
  const auto n = grid.size();
  const auto x = grid.coordinates();
  const auto k = grid.wavenumbers();
  const double w = 2.0 * kPi / grid.box_length();

  DiosiFamilies f{{grid, gamma, {}, {}, {}, false}, {grid, gamma, {}, {}, {}, true}};
  RealField g(n, 0.0);  // w * c_k^2 per FFT index
  for (std::size_t m = 0; m < n; ++m) {
    if (k[m] == 0.0) continue;
    const double c = cutoff.profile(k[m]) / std::abs(k[m]);
    g[m] = w * c * c;
    ComplexField d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = c * Complex(std::cos(k[m] * x[j]), std::sin(k[m] * x[j]));
    f.modes.diagonals.push_back(std::move(d));
    f.modes.weights.push_back(w);
    f.modes.wavenumbers.push_back(k[m]);
  }
  // f(x) = sum_k a_k exp(i k x), a_k = sqrt(g_k / n): sum_m f(x_i - y_m) f(x_j - y_m)
  // = n sum_k a_k^2 exp(i k (x_i - x_j)), which matches the mode family.
  RealField profile(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    const double dx = static_cast<double>(s) * grid.spacing();
    profile[s] = pairwise_sum<double>(n, [&](std::size_t m) {
      return std::sqrt(g[m] / static_cast<double>(n)) * std::cos(k[m] * dx);
    });
  }
  for (std::size_t m = 0; m < n; ++m) {
    ComplexField d(n);
    for (std::size_t j = 0; j < n; ++j) d[j] = profile[(j + n - m) % n];
    f.hermitian.diagonals.push_back(std::move(d));
    f.hermitian.weights.push_back(1.0);
  }
  return f;
}

double diosi_gamma(const UnitSystem& units) { return units.kappa / (2.0 * kPi * kPi); }

double diosi_gamma_si(const PhysicalConstants& pc) { return pc.G / (2.0 * kPi * kPi * pc.hbar); }

LindbladFamily hermitian_family(const Grid& grid, std::vector<RealField> diagonals, double gamma) {
  require_site_grid(grid);
  LindbladFamily f{grid, gamma, {}, {}, {}, true};
  for (auto& d : diagonals) {
    if (d.size() != grid.size()) throw InvalidArgument("operator diagonal does not match grid");
    for (double v : d) {
      if (!std::isfinite(v)) throw InvalidArgument("operator entries must be finite");
    }
    f.diagonals.emplace_back(d.begin(), d.end());
    f.weights.push_back(1.0);
  }
  return f;
}

Eigen::MatrixXcd dephasing_rates(const LindbladFamily& family) {
  const auto n = static_cast<Eigen::Index>(family.grid.size());
  Eigen::MatrixXcd r = Eigen::MatrixXcd::Zero(n, n);
  for (std::size_t a = 0; a < family.size(); ++a) {
    const auto& d = family.diagonals[a];
    const double w = family.weights[a];
    for (Eigen::Index i = 0; i < n; ++i) {
      const Complex li = d[static_cast<std::size_t>(i)];
      for (Eigen::Index j = 0; j < n; ++j) {
        const Complex lj = d[static_cast<std::size_t>(j)];
        r(i, j) += w * (li * std::conj(lj) - 0.5 * (std::norm(li) + std::norm(lj)));
      }
    }
  }
  return family.gamma * r;
}

Eigen::MatrixXcd dissipator(const LindbladFamily& family, const Eigen::MatrixXcd& rho) {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(rho.rows(), rho.cols());
  for (std::size_t a = 0; a < family.size(); ++a) {
    const Eigen::MatrixXcd l = family.operator_matrix(a);
    const Eigen::MatrixXcd ldl = l.adjoint() * l;
    out += family.weights[a] * (l * rho * l.adjoint() - 0.5 * (ldl * rho + rho * ldl));
  }
  return family.gamma * out;
}

Eigen::MatrixXcd free_hamiltonian(const Grid& grid) {
  require_site_grid(grid);
  const auto n = static_cast<Eigen::Index>(grid.size());
  const auto k = grid.wavenumbers();
  const auto x = grid.coordinates();
  Eigen::MatrixXcd h(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double dx = x[static_cast<std::size_t>(i)] - x[static_cast<std::size_t>(j)];
      h(i, j) = pairwise_sum<Complex>(k.size(), [&](std::size_t m) {
                  return 0.5 * k[m] * k[m] * Complex(std::cos(k[m] * dx), std::sin(k[m] * dx));
                }) / static_cast<double>(n);
    }
  }
  return h;
}

LindbladIntegrator::LindbladIntegrator(const LindbladFamily& family, Eigen::MatrixXcd hamiltonian)
    : grid_(family.grid), hamiltonian_(std::move(hamiltonian)), rates_(dephasing_rates(family)) {
  require_site_grid(grid_);
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (hamiltonian_.rows() != n || hamiltonian_.cols() != n) throw InvalidArgument("Hamiltonian shape does not match grid");
}

Eigen::MatrixXcd LindbladIntegrator::derivative(const Eigen::MatrixXcd& rho) const {
  const Complex i(0.0, 1.0);
  return -i * (hamiltonian_ * rho - rho * hamiltonian_) + rates_.cwiseProduct(rho);
}

DensityMatrix LindbladIntegrator::step(const DensityMatrix& rho, double dt, LindbladStepReport* report) const {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const Eigen::MatrixXcd& r = rho.matrix();
  const Eigen::MatrixXcd k1 = derivative(r);
  const Eigen::MatrixXcd k2 = derivative(r + 0.5 * dt * k1);
  const Eigen::MatrixXcd k3 = derivative(r + 0.5 * dt * k2);
  const Eigen::MatrixXcd k4 = derivative(r + dt * k3);
  Eigen::MatrixXcd next = r + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  next = 0.5 * (next + next.adjoint()).eval();
  const double drift = std::abs(next.trace() - r.trace());
  if (!(drift <= 1e-8)) {
    throw StepSizeError("trace drift " + std::to_string(drift) + " exceeds 1e-8; reduce dt");
  }
  DensityMatrix out(grid_, std::move(next));
  if (report) {
    report->trace_drift = drift;
    report->min_eigenvalue = out.min_eigenvalue();
    report->positivity_warning = report->min_eigenvalue < -1e-8;
  }
  return out;
}

DensityMatrix LindbladIntegrator::evolve(DensityMatrix rho, double dt, long steps, long* warnings) const {
  long count = 0;
  for (long s = 0; s < steps; ++s) {
    LindbladStepReport rep;
    rho = step(rho, dt, warnings ? &rep : nullptr);
    if (rep.positivity_warning) ++count;
  }
  if (warnings) *warnings = count;
  return rho;
}

DensityMatrix lindblad_step(const DensityMatrix& rho, const LindbladFamily& family,
                            const Eigen::MatrixXcd& hamiltonian, double dt, LindbladStepReport* report) {
  return LindbladIntegrator(family, hamiltonian).step(rho, dt, report);
}

void TrajectoryConfig::validate() const {
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  if (steps < 1) throw InvalidArgument("steps must be at least 1");
  if (ensemble_size < 1) throw InvalidArgument("ensemble_size must be at least 1");
  if (record_every < 0) throw InvalidArgument("record_every must be non-negative");
}

std::uint64_t trajectory_seed(std::uint64_t master_seed, std::uint64_t index) {
  std::uint64_t z = master_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

SseIntegrator::SseIntegrator(const LindbladFamily& family, const Eigen::MatrixXcd& hamiltonian, double dt)
    : grid_(family.grid), dt_(dt), gamma_(family.gamma) {
  require_site_grid(grid_);
  if (!family.hermitian) {
    throw InvalidArgument("stochastic evolution uses the Hermitian representation of the family");
  }
  if (!(dt > 0.0)) throw InvalidArgument("dt must be positive");
  const auto n = static_cast<Eigen::Index>(grid_.size());
  if (hamiltonian.rows() != n || hamiltonian.cols() != n) throw InvalidArgument("Hamiltonian shape does not match grid");
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (hamiltonian + hamiltonian.adjoint()));
  Eigen::VectorXcd phase(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = es.eigenvalues()(i) * dt;
    phase(i) = Complex(std::cos(e), -std::sin(e));
  }
  unitary_ = es.eigenvectors() * phase.asDiagonal() * es.eigenvectors().adjoint();
  for (std::size_t a = 0; a < family.size(); ++a) {
    RealField d(grid_.size());
    const double s = std::sqrt(family.weights[a]);
    for (std::size_t j = 0; j < d.size(); ++j) d[j] = s * family.diagonals[a][j].real();
    diagonals_.push_back(std::move(d));
  }
}

double SseIntegrator::step(ComplexField& psi, std::span<const double> dw) const {
  const auto n = static_cast<Eigen::Index>(psi.size());
  if (dw.size() != diagonals_.size()) throw InvalidArgument("one Wiener increment per operator required");
  Eigen::Map<Eigen::VectorXcd> v(psi.data(), n);
  v = (unitary_ * v).eval();
  const double h = grid_.spacing();
  const double sg = std::sqrt(gamma_);
  ComplexField factor(psi.size(), Complex(1.0, 0.0));
  for (std::size_t a = 0; a < diagonals_.size(); ++a) {
    const RealField& f = diagonals_[a];
    const double ell = pairwise_sum<double>(psi.size(), [&](std::size_t j) { return f[j] * std::norm(psi[j]); }) * h;
    for (std::size_t j = 0; j < psi.size(); ++j) {
      const double df = f[j] - ell;
      factor[j] += sg * df * dw[a] - 0.5 * gamma_ * df * df * dt_;
    }
  }
  for (std::size_t j = 0; j < psi.size(); ++j) psi[j] *= factor[j];
  const double norm2 = pairwise_sum<double>(psi.size(), [&](std::size_t j) { return std::norm(psi[j]); }) * h;
  if (norm2 > 0.0 && std::isfinite(norm2)) {
    const double s = 1.0 / std::sqrt(norm2);
    for (auto& p : psi) p *= s;
  }
  return norm2;
}

namespace {

struct TrajectoryRun {
  ComplexField final_state;
  std::vector<double> norms;
};

template <typename Record>
TrajectoryRun run_trajectory(const SseIntegrator& integ, const WaveFunction& psi0, const TrajectoryConfig& cfg,
                             std::uint64_t seed, const Record& record) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, std::sqrt(cfg.dt));
  TrajectoryRun run{ComplexField(psi0.amplitudes().begin(), psi0.amplitudes().end()), {}};
  run.norms.reserve(static_cast<std::size_t>(cfg.steps));
  std::vector<double> dw(integ.operator_count());
  record(0L, run.final_state);
  for (long s = 1; s <= cfg.steps; ++s) {
    for (auto& x : dw) x = normal(rng);
    run.norms.push_back(integ.step(run.final_state, dw));
    for (const auto& p : run.final_state) {
      if (!std::isfinite(p.real()) || !std::isfinite(p.imag())) {
        throw NumericalBlowup(s, seed, "non-finite amplitude in stochastic trajectory");
      }
    }
    record(s, run.final_state);
  }
  return run;
}

}  // namespace

Trajectory sse_trajectory(const WaveFunction& psi0, const LindbladFamily& family,
                          const Eigen::MatrixXcd& hamiltonian, const TrajectoryConfig& cfg) {
  cfg.validate();
  const SseIntegrator integ(family, hamiltonian, cfg.dt);
  Trajectory t;
  auto record = [&](long s, const ComplexField& psi) {
    const bool keep = cfg.record_every > 0 ? s % cfg.record_every == 0 : s == cfg.steps;
    if (!keep) return;
    t.times.push_back(static_cast<double>(s) * cfg.dt);
    t.states.emplace_back(psi0.grid(), psi);
  };
  auto run = run_trajectory(integ, psi0, cfg, trajectory_seed(cfg.seed, 0), record);
  t.prenormalization_norms = std::move(run.norms);
  return t;
}

EnsembleResult sse_ensemble(const WaveFunction& psi0, const LindbladFamily& family,
                            const Eigen::MatrixXcd& hamiltonian, const TrajectoryConfig& cfg, int workers) {
  cfg.validate();
  const SseIntegrator integ(family, hamiltonian, cfg.dt);
  const auto n = static_cast<Eigen::Index>(psi0.grid().size());
  const double h = psi0.grid().spacing();
  const auto total = static_cast<std::size_t>(cfg.ensemble_size);
  constexpr std::size_t kChunk = 64;
  const std::size_t chunks = (total + kChunk - 1) / kChunk;

  const std::size_t n_records =
      cfg.record_every > 0 ? static_cast<std::size_t>(cfg.steps / cfg.record_every + 1) : 0;
  struct ChunkResult {
    Eigen::MatrixXcd rho;
    std::vector<Eigen::MatrixXcd> recorded;
    double dev_sum = 0.0;
    double dev_sq = 0.0;
    std::size_t count = 0;
  };
  std::vector<ChunkResult> partial(chunks);
  std::vector<double> weights(total, 0.0);
  RealField first(psi0.grid().size(), 0.0);
  if (family.size() > 0) {
    for (std::size_t j = 0; j < first.size(); ++j) first[j] = family.diagonals[0][j].real();
  }

  auto run_chunk = [&](std::size_t c) {
    ChunkResult r{Eigen::MatrixXcd::Zero(n, n), std::vector<Eigen::MatrixXcd>(n_records, Eigen::MatrixXcd::Zero(n, n))};
    const std::size_t end = std::min(total, (c + 1) * kChunk);
    auto record = [&](long s, const ComplexField& psi) {
      if (n_records == 0 || s % cfg.record_every != 0) return;
      Eigen::VectorXcd v(n);
      for (Eigen::Index j = 0; j < n; ++j) v(j) = std::sqrt(h) * psi[static_cast<std::size_t>(j)];
      r.recorded[static_cast<std::size_t>(s / cfg.record_every)] += v * v.adjoint();
    };
    for (std::size_t i = c * kChunk; i < end; ++i) {
      auto run = run_trajectory(integ, psi0, cfg, trajectory_seed(cfg.seed, i), record);
      Eigen::VectorXcd v(n);
      for (Eigen::Index j = 0; j < n; ++j) v(j) = std::sqrt(h) * run.final_state[static_cast<std::size_t>(j)];
      r.rho += v * v.adjoint();
      for (double q : run.norms) {
        r.dev_sum += q - 1.0;
        r.dev_sq += (q - 1.0) * (q - 1.0);
      }
      r.count += run.norms.size();
      weights[i] = pairwise_sum<double>(first.size(), [&](std::size_t j) {
                     return first[j] * std::norm(run.final_state[j]);
                   }) * h;
    }
    partial[c] = std::move(r);
  };

  const int nw = std::max(1, std::min<int>(workers, static_cast<int>(chunks)));
  if (nw == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
  } else {
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (int w = 0; w < nw; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t c = static_cast<std::size_t>(w); c < chunks; c += static_cast<std::size_t>(nw)) run_chunk(c);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
  }

  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n, n);
  std::vector<Eigen::MatrixXcd> recorded(n_records, Eigen::MatrixXcd::Zero(n, n));
  double dev_sum = 0.0;
  double dev_sq = 0.0;
  std::size_t count = 0;
  for (const auto& p : partial) {
    rho += p.rho;
    for (std::size_t t = 0; t < n_records; ++t) recorded[t] += p.recorded[t];
    dev_sum += p.dev_sum;
    dev_sq += p.dev_sq;
    count += p.count;
  }
  rho /= static_cast<double>(total);
  EnsembleResult out{DensityMatrix(psi0.grid(), rho), std::move(weights), 0.0, 0.0, {}, {}};
  const double cnt = static_cast<double>(count);
  out.prenorm_mean = dev_sum / cnt;
  const double var = std::max(0.0, dev_sq / cnt - out.prenorm_mean * out.prenorm_mean);
  out.prenorm_stderr = std::sqrt(var / cnt);
  for (std::size_t t = 0; t < n_records; ++t) {
    out.times.push_back(static_cast<double>(t) * static_cast<double>(cfg.record_every) * cfg.dt);
    out.recorded.push_back(recorded[t] / static_cast<double>(total));
  }
  return out;
}

DriftDecomposition drift_decomposition(const WaveFunction& state, double gamma, double kappa_sn) {
  const Grid& grid = state.grid();
  if (grid.dimension() != 3) throw InvalidArgument("drift decomposition needs a 3D grid");
  if (grid.points_per_axis() > 32) throw InvalidArgument("drift decomposition uses direct mode sums; at most 32 points per axis");
  if (kappa_sn < 0.0) kappa_sn = 2.0 * kPi * kPi * gamma;
  const auto n = static_cast<std::size_t>(grid.points_per_axis());
  const std::size_t size = grid.size();
  const auto x = grid.coordinates();
  const auto k = grid.wavenumbers();
  const auto psi = state.amplitudes();
  const double dv = grid.cell_volume();
  const double w = std::pow(2.0 * kPi / grid.box_length(), 3);

  // phase[m][j] = exp(i k_m x_j)
  std::vector<ComplexField> phase(n, ComplexField(n));
  for (std::size_t m = 0; m < n; ++m) {
    for (std::size_t j = 0; j < n; ++j) phase[m][j] = Complex(std::cos(k[m] * x[j]), std::sin(k[m] * x[j]));
  }
  auto e_ikr = [&](std::size_t kf, std::size_t rf) {
    const auto a = grid.unflatten(kf);
    const auto b = grid.unflatten(rf);
    const auto u = [](int v) { return static_cast<std::size_t>(v); };
    return phase[u(a[0])][u(b[0])] * phase[u(a[1])][u(b[1])] * phase[u(a[2])][u(b[2])];
  };

  // <L^dag(k)> = <exp(-i k.r)> / |k| by direct sums
  ComplexField expect(size, Complex{});
  for (std::size_t kf = 0; kf < size; ++kf) {
    const double k2 = grid.k_squared(kf);
    if (k2 == 0.0) continue;
    expect[kf] = pairwise_sum<Complex>(size, [&](std::size_t rf) {
                   return std::norm(psi[rf]) * std::conj(e_ikr(kf, rf));
                 }) * dv / std::sqrt(k2);
  }

  DriftDecomposition d;
  d.gamma = gamma;
  d.kappa_sn = kappa_sn;
  const Complex i(0.0, 1.0);

  double c1 = 0.0;
  double c2 = 0.0;
  Complex scalar{};
  for (std::size_t kf = 0; kf < size; ++kf) {
    const double k2 = grid.k_squared(kf);
    if (k2 == 0.0) continue;
    const double ell = expect[kf].real();
    c1 += w / k2;
    c2 += w * ell * ell;
    scalar += w * ell * expect[kf];
  }
  d.substitution_operator.resize(size);
  d.deterministic_drift.resize(size);
  d.substitution_scalar.resize(size);
  for (std::size_t rf = 0; rf < size; ++rf) {
    Complex op{};
    double ell_l = 0.0;
    for (std::size_t kf = 0; kf < size; ++kf) {
      const double k2 = grid.k_squared(kf);
      if (k2 == 0.0) continue;
      const Complex l = e_ikr(kf, rf) / std::sqrt(k2);
      op += w * expect[kf] * l;
      ell_l += w * expect[kf].real() * l.real();
    }
    // sum over +-k pairs makes sum_k w l_k L(k) real; the Nyquist planes pair with themselves
    d.substitution_operator[rf] = i * gamma * op * psi[rf];
    d.deterministic_drift[rf] = -0.5 * gamma * (c1 - 2.0 * ell_l + c2) * psi[rf];
    d.substitution_scalar[rf] = -i * gamma * scalar * psi[rf];
  }

  d.sn_term = kspace_nonlinear_term(state, kappa_sn);
  for (auto& v : d.sn_term) v *= -i;

  d.hamiltonian.assign(psi.begin(), psi.end());
  const Fft fft(3, grid.points_per_axis());
  fft.forward(d.hamiltonian);
  for (std::size_t f = 0; f < size; ++f) d.hamiltonian[f] *= -i * 0.5 * grid.k_squared(f);
  fft.inverse(d.hamiltonian);

  const double cc = pairwise_sum<double>(size, [&](std::size_t j) { return std::norm(d.sn_term[j]); });
  const double cb = pairwise_sum<double>(size, [&](std::size_t j) {
    return (std::conj(d.sn_term[j]) * d.substitution_operator[j]).real();
  });
  const double diff = pairwise_sum<double>(size, [&](std::size_t j) {
    return std::norm(d.substitution_operator[j] - d.sn_term[j]);
  });
  const double nan = std::numeric_limits<double>::quiet_NaN();
  d.coefficient_ratio = cc > 0.0 ? cb / cc : nan;
  d.field_discrepancy = cc > 0.0 ? std::sqrt(diff / cc) : nan;
  d.nominal_ratio = kappa_sn > 0.0 ? gamma / (kappa_sn / (2.0 * kPi * kPi)) : nan;
  return d;
}

HeatingRate heating_rate(double mass_kg, double r0_m, const PhysicalConstants& pc) {
  if (!(mass_kg > 0.0)) throw InvalidArgument("mass must be positive");
  if (!(r0_m > 0.0)) throw InvalidArgument("cutoff R0 must be positive");
  HeatingRate r;
  r.joules_per_second =
      pc.G * mass_kg * pc.hbar * std::pow(kPi / 2.0, 1.5) / (4.0 * kPi * kPi * r0_m * r0_m * r0_m);
  r.kelvin_per_second = r.joules_per_second / pc.kB;
  return r;
}

double heating_rate_dimensionless(double gamma, double r0) {
  if (!(r0 > 0.0)) throw InvalidArgument("cutoff R0 must be positive");
  return 0.5 * gamma * std::pow(kPi / 2.0, 1.5) / (r0 * r0 * r0);
}

}  // namespace snlab
