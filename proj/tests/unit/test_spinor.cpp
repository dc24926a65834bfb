#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "snlab/dynamics.hpp"
#include "snlab/errors.hpp"
#include "snlab/spinor.hpp"

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

SpinorWaveFunction run(SpinorWaveFunction s, const EvolutionConfig& cfg, SpinorCoupling c) {
  const SpinorStepper stepper(s.grid(), cfg, c);
  for (long k = 1; k <= cfg.steps; ++k) stepper.step(s, k);
  return s;
}

double half_separation(const SpinorWaveFunction& s, const EvolutionConfig& cfg, SpinorCoupling c) {
  const PoissonSolver solver(s.grid(), cfg.kernel);
  return spinor_diagnostics(s, solver, cfg.kappa, c, 0).half_separation;
}

}  // namespace

TEST_CASE("split spinor has equal component weights and opposite momenta") {
  const Grid g = Grid::with_box(1, 256, 40.0);
  const auto s = make_split_spinor(make_gaussian(g, 1.0), 1.0, 0);
  CHECK(s.plus_norm() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(s.minus_norm() == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(kinetic_energy(g, s.plus()) == doctest::Approx(0.5 * (0.125 + 0.5)).epsilon(1e-10));
}

TEST_CASE("without gravity both couplings give the same outcome") {
  const Grid g = Grid::with_box(1, 512, 80.0);
  const auto s0 = make_split_spinor(make_gaussian(g, 1.0), 1.0, 0);
  const auto cfg = config(g, 0.0, 500);
  const auto a = run(s0, cfg, SpinorCoupling::separate);
  const auto b = run(s0, cfg, SpinorCoupling::shared);
  CHECK(testing::rel_l2(a.plus(), b.plus()) < 1e-14);
  CHECK(half_separation(a, cfg, SpinorCoupling::separate) == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("shared coupling pulls the branches together") {
  const Grid g = Grid::with_box(1, 512, 80.0);
  const auto s0 = make_split_spinor(make_gaussian(g, 1.0), 1.0, 0);
  const auto cfg = config(g, 1.0, 500);
  const double d = half_separation(run(s0, cfg, SpinorCoupling::separate), cfg, SpinorCoupling::separate);
  const double dp = half_separation(run(s0, cfg, SpinorCoupling::shared), cfg, SpinorCoupling::shared);
  CHECK(dp < d);
  CHECK(d == doctest::Approx(5.0).epsilon(1e-3));
}

TEST_CASE("component norms and energy are conserved") {
  const Grid g = Grid::with_box(1, 512, 80.0);
  const auto s0 = make_split_spinor(make_gaussian(g, 1.0), 1.0, 0);
  for (auto c : {SpinorCoupling::separate, SpinorCoupling::shared}) {
    const auto cfg = config(g, 1.0, 300);
    const PoissonSolver solver(g, cfg.kernel);
    const auto d0 = spinor_diagnostics(s0, solver, 1.0, c, 0);
    const auto s = run(s0, cfg, c);
    const auto d1 = spinor_diagnostics(s, solver, 1.0, c, 0);
    CHECK(std::abs(d1.plus_norm - 0.5) < 1e-12);
    CHECK(std::abs(d1.minus_norm - 0.5) < 1e-12);
    CHECK(std::abs(d1.total_energy - d0.total_energy) < 1e-4 * std::abs(d0.total_energy));
  }
}

TEST_CASE("a single component under separate coupling evolves like a scalar") {
  const Grid g = Grid::with_box(1, 256, 40.0);
  const WaveFunction phi = make_gaussian(g, 1.0, {}, {0.5, 0.0, 0.0});
  const ComplexField zero(g.size());
  const SpinorWaveFunction s0(g, ComplexField(phi.amplitudes().begin(), phi.amplitudes().end()), zero);
  const auto cfg = config(g, 2.0, 200);
  const auto s = run(s0, cfg, SpinorCoupling::separate);
  const auto scalar = evolve(phi, cfg).final_state;
  CHECK(testing::rel_l2(s.plus(), scalar.amplitudes()) < 1e-12);
}

TEST_CASE("coupling names round trip") {
  CHECK(to_string(SpinorCoupling::separate) == "separate");
  CHECK(to_string(SpinorCoupling::shared) == "shared");
}

TEST_CASE("split spinor axis is checked") {
  const Grid g = Grid::with_box(1, 64, 20.0);
  CHECK_THROWS_AS(make_split_spinor(make_gaussian(g, 1.0), 1.0, 2), InvalidArgument);
}
