#include "snlab/state.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "snlab/errors.hpp"
#include "snlab/summation.hpp"

namespace snlab {

double field_norm(const Grid& grid, std::span<const Complex> field) {
  return pairwise_sum<double>(field.size(), [&](std::size_t i) { return std::norm(field[i]); }) *
         grid.cell_volume();
}

namespace {

void require_size(const Grid& grid, std::size_t actual, std::size_t factor, const char* what) {
  if (actual != grid.size() * factor) {
    throw InvalidArgument(std::string(what) + " has " + std::to_string(actual) +
                          " amplitudes, grid needs " + std::to_string(grid.size() * factor));
  }
}

void scale(ComplexField& f, double s) {
  for (auto& v : f) v *= s;
}

}  // namespace

WaveFunction::WaveFunction(Grid grid, ComplexField amplitudes)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
  require_size(grid_, amplitudes_.size(), 1, "wave function");
}

WaveFunction WaveFunction::normalized(Grid grid, ComplexField amplitudes) {
  WaveFunction w(std::move(grid), std::move(amplitudes));
  w.renormalize();
  return w;
}

void WaveFunction::renormalize() {
  const double n = field_norm(grid_, amplitudes_);
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ContractViolation("cannot normalize a wave function with norm " + std::to_string(n));
  }
  scale(amplitudes_, 1.0 / std::sqrt(n));
}

RealField WaveFunction::density() const {
  RealField rho(amplitudes_.size());
  for (std::size_t i = 0; i < rho.size(); ++i) rho[i] = std::norm(amplitudes_[i]);
  return rho;
}

WaveFunction make_gaussian(const Grid& grid, double width, std::array<double, 3> centre,
                           std::array<double, 3> momentum) {
  if (!(width > 0.0)) throw InvalidArgument("Gaussian width must be positive");
  ComplexField amps(grid.size());
  const int d = grid.dimension();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    const auto r = grid.position(i);
    double exponent = 0.0;
    double phase = 0.0;
    for (int a = 0; a < d; ++a) {
      const auto ua = static_cast<std::size_t>(a);
      const double dx = r[ua] - centre[ua];
      exponent -= dx * dx / (4.0 * width * width);
      phase += momentum[ua] * r[ua];
    }
    amps[i] = std::exp(exponent) * Complex(std::cos(phase), std::sin(phase));
  }
  return WaveFunction::normalized(grid, std::move(amps));
}

SpinorWaveFunction::SpinorWaveFunction(Grid grid, ComplexField plus, ComplexField minus)
    : grid_(std::move(grid)), plus_(std::move(plus)), minus_(std::move(minus)) {
  require_size(grid_, plus_.size(), 1, "spinor plus component");
  require_size(grid_, minus_.size(), 1, "spinor minus component");
}

SpinorWaveFunction SpinorWaveFunction::normalized(Grid grid, ComplexField plus,
                                                  ComplexField minus) {
  SpinorWaveFunction s(std::move(grid), std::move(plus), std::move(minus));
  s.renormalize();
  return s;
}

double SpinorWaveFunction::plus_norm() const { return field_norm(grid_, plus_); }
double SpinorWaveFunction::minus_norm() const { return field_norm(grid_, minus_); }

void SpinorWaveFunction::renormalize() {
  const double n = total_norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ContractViolation("cannot normalize a spinor with norm " + std::to_string(n));
  }
  const double s = 1.0 / std::sqrt(n);
  scale(plus_, s);
  scale(minus_, s);
}

TwoParticleWaveFunction::TwoParticleWaveFunction(Grid grid, ComplexField amplitudes)
    : grid_(std::move(grid)), amplitudes_(std::move(amplitudes)) {
  if (grid_.dimension() != 1) {
    throw InvalidArgument("two-particle states live on a 1D grid");
  }
  require_size(grid_, amplitudes_.size(), grid_.size(), "two-particle state");
}

TwoParticleWaveFunction TwoParticleWaveFunction::normalized(Grid grid, ComplexField amplitudes) {
  TwoParticleWaveFunction s(std::move(grid), std::move(amplitudes));
  s.renormalize();
  return s;
}

TwoParticleWaveFunction TwoParticleWaveFunction::product(const WaveFunction& first,
                                                         const WaveFunction& second) {
  if (!(first.grid() == second.grid())) throw InvalidArgument("factor grids differ");
  const auto n = first.grid().size();
  ComplexField amps(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) amps[i * n + j] = first.amplitudes()[i] * second.amplitudes()[j];
  }
  return normalized(first.grid(), std::move(amps));
}

double TwoParticleWaveFunction::norm() const {
  const double h = grid_.spacing();
  return pairwise_sum<double>(amplitudes_.size(),
                              [&](std::size_t i) { return std::norm(amplitudes_[i]); }) *
         h * h;
}

void TwoParticleWaveFunction::renormalize() {
  const double n = norm();
  if (!(n > 0.0) || !std::isfinite(n)) {
    throw ContractViolation("cannot normalize a two-particle state with norm " + std::to_string(n));
  }
  scale(amplitudes_, 1.0 / std::sqrt(n));
}

std::array<RealField, 2> TwoParticleWaveFunction::marginals() const {
  const auto n = grid_.size();
  const double h = grid_.spacing();
  RealField first(n, 0.0);
  RealField second(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    first[i] = pairwise_sum<double>(n, [&](std::size_t j) { return std::norm(amplitudes_[i * n + j]); }) * h;
  }
  for (std::size_t j = 0; j < n; ++j) {
    second[j] = pairwise_sum<double>(n, [&](std::size_t i) { return std::norm(amplitudes_[i * n + j]); }) * h;
  }
  return {std::move(first), std::move(second)};
}

}  // namespace snlab
