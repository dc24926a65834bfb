#include <doctest.h>

#include <cmath>

#include "snlab/errors.hpp"
#include "snlab/two_particle.hpp"

using namespace snlab;

namespace {

EvolutionConfig config(const Grid& g, double kappa, long steps) {
  EvolutionConfig cfg;
  cfg.dt = 0.01;
  cfg.steps = steps;
  cfg.kappa = kappa;
  cfg.kernel = KernelSpec::default_for(g);
  return cfg;
}

TwoParticleWaveFunction run(TwoParticleWaveFunction s, const TwoParticleStepper& stepper, long steps) {
  for (long k = 1; k <= steps; ++k) stepper.step(s, k);
  return s;
}

double com_law(double s, double t) { return std::sqrt(0.5 * s * s + t * t / (8.0 * s * s)); }

}  // namespace

TEST_CASE("product state marginals are the factors") {
  const Grid g = Grid::with_box(1, 64, 20.0);
  const WaveFunction a = make_gaussian(g, 1.0, {-2.0, 0.0, 0.0});
  const WaveFunction b = make_gaussian(g, 1.5, {1.0, 0.0, 0.0});
  const auto psi = TwoParticleWaveFunction::product(a, b);
  CHECK(psi.norm() == doctest::Approx(1.0).epsilon(1e-12));
  const auto m = psi.marginals();
  const RealField ra = a.density(), rb = b.density();
  for (std::size_t i = 0; i < ra.size(); ++i) {
    CHECK(m[0][i] == doctest::Approx(ra[i]).epsilon(1e-12));
    CHECK(m[1][i] == doctest::Approx(rb[i]).epsilon(1e-12));
  }
  CHECK(schmidt_rank(psi) == 1);
}

TEST_CASE("non-interacting particles spread like a free mass-2 centre of mass") {
  const Grid g = Grid::with_box(1, 128, 40.0);
  const auto psi = TwoParticleWaveFunction::product(make_gaussian(g, 1.0), make_gaussian(g, 1.0));
  const TwoParticleStepper stepper(g, config(g, 1.0, 300), TwoParticleInteraction::none);
  const auto s = run(psi, stepper, 300);
  const auto d = two_particle_diagnostics(s, stepper, 3.0);
  CHECK(d.com_width == doctest::Approx(com_law(1.0, 3.0)).epsilon(1e-8));
  CHECK(schmidt_rank(s) == 1);
}

TEST_CASE("pairwise interaction leaves the centre of mass free") {
  const Grid g = Grid::with_box(1, 128, 40.0);
  const auto psi = TwoParticleWaveFunction::product(make_gaussian(g, 1.0), make_gaussian(g, 1.0));
  const TwoParticleStepper lin(g, config(g, 1.0, 300), TwoParticleInteraction::linear_pairwise);
  const TwoParticleStepper sn(g, config(g, 1.0, 300), TwoParticleInteraction::sn_selfconsistent);
  const auto dl = two_particle_diagnostics(run(psi, lin, 300), lin, 3.0);
  const auto ds = two_particle_diagnostics(run(psi, sn, 300), sn, 3.0);
  CHECK(dl.com_width == doctest::Approx(com_law(1.0, 3.0)).epsilon(1e-3));
  CHECK(ds.com_width < dl.com_width);
  CHECK(std::abs(dl.com_mean) < 1e-10);
}

TEST_CASE("pairwise interaction entangles the particles") {
  const Grid g = Grid::with_box(1, 64, 30.0);
  const auto psi = TwoParticleWaveFunction::product(make_gaussian(g, 1.0), make_gaussian(g, 1.0));
  const TwoParticleStepper lin(g, config(g, 2.0, 100), TwoParticleInteraction::linear_pairwise);
  CHECK(schmidt_rank(run(psi, lin, 100)) > 1);
}

TEST_CASE("pair kernel depends only on the separation and is symmetric") {
  const Grid g = Grid::with_box(1, 64, 30.0);
  const TwoParticleStepper lin(g, config(g, 1.0, 1), TwoParticleInteraction::linear_pairwise);
  const auto psi = TwoParticleWaveFunction::product(make_gaussian(g, 1.0), make_gaussian(g, 1.0));
  const RealField v = lin.potential(psi);
  const std::size_t n = 64;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(v[i * n + j] == doctest::Approx(v[j * n + i]).epsilon(1e-14));
      CHECK(v[i * n + j] == doctest::Approx(v[((i + 3) % n) * n + (j + 3) % n]).epsilon(1e-14));
    }
  }
}

TEST_CASE("norm and energy are conserved for both interactions") {
  const Grid g = Grid::with_box(1, 64, 30.0);
  const auto psi = TwoParticleWaveFunction::product(make_gaussian(g, 1.0), make_gaussian(g, 1.0));
  for (auto kind : {TwoParticleInteraction::linear_pairwise, TwoParticleInteraction::sn_selfconsistent}) {
    const TwoParticleStepper st(g, config(g, 1.0, 200), kind);
    const auto d0 = two_particle_diagnostics(psi, st, 0.0);
    const auto d1 = two_particle_diagnostics(run(psi, st, 200), st, 2.0);
    CHECK(std::abs(d1.norm - 1.0) < 1e-12);
    CHECK(std::abs(d1.total_energy - d0.total_energy) < 1e-4 * std::abs(d0.total_energy));
  }
}

TEST_CASE("two-particle stepper limits") {
  CHECK_THROWS_AS(TwoParticleStepper(Grid::with_box(3, 8, 8.0), EvolutionConfig{}, TwoParticleInteraction::none),
                  InvalidArgument);
  const Grid big = Grid::with_box(1, 512, 40.0);
  CHECK_THROWS_AS(TwoParticleStepper(big, config(big, 1.0, 1), TwoParticleInteraction::none), InvalidArgument);
  CHECK(two_particle_interaction_from_string("linear_pairwise") == TwoParticleInteraction::linear_pairwise);
}
