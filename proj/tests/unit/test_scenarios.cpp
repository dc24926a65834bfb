#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "snlab/constants.hpp"
#include "snlab/errors.hpp"
#include "snlab/scenarios.hpp"

using namespace snlab;

namespace {
const PhysicalConstants& pc() { return PhysicalConstants::codata2018(); }
}  // namespace

TEST_CASE("signalling arithmetic") {
  const double m = 1e-22, d0 = 2e-6, dd = 1e-6, v = 3.0, s = 5.0;
  const auto e = signalling_distance(m, d0, dd, v, s);
  CHECK(e.delta_d_predicted == doctest::Approx(pc().G * m * s * s / (2.0 * v * v * d0 * d0)).epsilon(1e-14));
  CHECK(e.s_min == doctest::Approx(pc().c * d0 * std::sqrt(2.0 * dd / (pc().G * m))).epsilon(1e-14));
  CHECK(e.s_min_lightyears * kLightYearMetres == doctest::Approx(e.s_min).epsilon(1e-14));
}

TEST_CASE("signalling distance for a 10000 u mass is of order a light-year") {
  const auto e = signalling_distance(1e4 * pc().atomic_mass_unit, 1e-6, 1e-6, 1.0, 1.0);
  CHECK(e.s_min_lightyears > 0.65);
  CHECK(e.s_min_lightyears < 2.0);
}

TEST_CASE("signalling result table is consistent with the estimate") {
  const auto r = run_signalling(1e4 * pc().atomic_mass_unit, 1e-6, 1e-6, 1.0, 1.0);
  const auto& t = r.table("travel_sweep");
  const auto s = t.column("travel_m");
  const auto d = t.column("delta_d_predicted_m");
  for (std::size_t i = 1; i < s.size(); ++i) {
    CHECK(d[i] / d[0] == doctest::Approx((s[i] / s[0]) * (s[i] / s[0])).epsilon(1e-12));
  }
  // the travel needed for delta_d reproduces delta_d
  const double s_needed = r.value("travel_for_delta_d");
  CHECK(signalling_distance(1e4 * pc().atomic_mass_unit, 1e-6, 1e-6, 1.0, s_needed).delta_d_predicted ==
        doctest::Approx(1e-6).epsilon(1e-12));
}

TEST_CASE("regime classifier margins") {
  const double threshold = std::pow(pc().planck_mass, 3) * pc().planck_length;
  const double m = 1e-17, sigma = 1e-6;
  const auto wide = regime_classifier(m, sigma, 1e-9);
  CHECK(wide.regime == Regime::wide);
  CHECK(wide.margin == doctest::Approx(m * m * m * sigma / threshold).epsilon(1e-14));
  CHECK(wide.nonlinear == (wide.margin >= 1.0));

  const auto narrow = regime_classifier(m, sigma, 1e-4);
  CHECK(narrow.regime == Regime::narrow);
  CHECK(narrow.margin == doctest::Approx(m * m * m * sigma * sigma / (1e-4 * threshold)).epsilon(1e-14));

  const auto mid = regime_classifier(m, sigma, 1e-6);
  CHECK(mid.regime == Regime::indeterminate);
  CHECK_FALSE(mid.nonlinear);

  CHECK_FALSE(regime_classifier(pc().atomic_mass_unit, sigma, 1e-10).nonlinear);
  CHECK(regime_classifier(1e-15, sigma, 1e-10).nonlinear);
  CHECK_THROWS_AS(regime_classifier(m, sigma, 0.0), InvalidArgument);
}

TEST_CASE("proton heating rates are near the quoted orders of magnitude") {
  const auto rows = heating_table(pc().proton_mass, {1e-15, 1e-7});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].kelvin_per_second > 1e-5);
  CHECK(rows[0].kelvin_per_second < 1e-3);
  CHECK(rows[1].kelvin_per_second > 1e-29);
  CHECK(rows[1].kelvin_per_second < 1e-27);
  CHECK_THROWS_AS(run_heating(pc().proton_mass, {}), InvalidArgument);
}

TEST_CASE("self-focusing narrows the packet relative to free spreading") {
  SelfFocusParams p;
  p.points = 256;
  p.box = 40.0;
  p.kappa = 4.0;
  p.dt = 0.01;
  p.steps = 200;
  p.record_every = 20;
  const auto r = run_self_focus(p);
  CHECK(r.value("width_ratio") < 1.0);
  CHECK(r.value("free_law_max_deviation") < 1e-4);
  CHECK(r.table("sn").rows.size() == 11);
  p.kappa = 0.0;
  CHECK(run_self_focus(p).value("width_ratio") == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("two packets attract with a fixed centre of mass") {
  TwoPacketParams p;
  p.points = 512;
  p.box = 100.0;
  p.width = 1.0;
  p.separation = 8.0;
  p.kappa = 3.0;
  p.dt = 0.01;
  p.steps = 400;
  p.record_every = 10;
  p.fit_time = 1.5;
  const auto r = run_two_packet(p);
  CHECK(r.value("com_drift_max") < 1e-9);
  CHECK(r.value("final_separation") < r.value("initial_separation"));
  CHECK(r.value("early_acceleration") < 0.0);
  CHECK(r.value("point_mass_acceleration") < 0.0);
}

TEST_CASE("shared coupling reduces the Stern-Gerlach splitting") {
  SternGerlachParams p;
  p.points = 512;
  p.box = 80.0;
  p.kappa = 2.0;
  p.detection_time = 5.0;
  const auto r = run_stern_gerlach(p);
  CHECK(r.value("d_prime") < r.value("d"));
  p.kappa = 0.0;
  const auto free = run_stern_gerlach(p);
  CHECK(std::abs(free.value("d") - free.value("d_prime")) < 1e-8);
}

TEST_CASE("two-particle runs separate linear and self-consistent coupling") {
  TwoParticleParams p;
  p.points = 64;
  p.box = 24.0;
  p.kappa = 3.0;
  p.steps = 100;
  const auto r = run_two_particle(p);
  CHECK(r.value("linear_pairwise_deviation") < 1e-3);
  CHECK(r.value("com_width_sn_selfconsistent") < r.value("com_width_linear_pairwise"));
  CHECK(r.value("schmidt_rank_none") == 1.0);
}

TEST_CASE("collapse scenarios report consistent summaries") {
  CollapseParams p;
  p.gamma = 0.2;
  p.steps = 50;
  p.ensemble_size = 100;
  const auto l = run_collapse_lindblad(p);
  CHECK(l.value("dissipator_equivalence") < 1e-12);
  CHECK(l.value("max_trace_drift") < 1e-9);
  CHECK(l.value("final_coherence") < 1.0);
  const auto s = run_collapse_sde(p);
  CHECK(s.value("trace_distance_bound") == doctest::Approx(0.5));
  CHECK(s.value("trace_distance_final") < s.value("trace_distance_bound"));
}

TEST_CASE("result accessors reject unknown names") {
  const auto r = run_heating(pc().proton_mass, {1e-15});
  CHECK_THROWS(r.at("missing"));
  CHECK_THROWS(r.table("missing"));
  CHECK(r.table("rates").rows.size() == 1);
}

TEST_CASE("early two-packet acceleration follows the point-mass estimate") {
  TwoPacketParams p;
  p.points = 1024;
  p.box = 100.0;
  p.width = 1.0;
  p.separation = 8.0;
  p.kappa = 3.0;
  p.dt = 0.005;
  p.steps = 300;
  p.record_every = 10;
  p.fit_time = 1.5;
  const auto r = run_two_packet(p);
  // relative acceleration of two half-mass lumps under the softened 1D kernel
  const double eps = 2.0 * p.box / p.points;
  const double d = r.value("initial_separation");
  const double expected = -p.kappa * d / std::pow(d * d + eps * eps, 1.5);
  CHECK(r.value("point_mass_acceleration") == doctest::Approx(expected).epsilon(1e-12));
  CHECK(std::abs(r.value("early_acceleration") / expected - 1.0) < 0.2);
}

TEST_CASE("Planck-scale packet spreads less than a free one") {
  SelfFocusParams p;  // kappa 1, width 1
  const auto r = run_self_focus(p);
  CHECK(r.value("final_width_sn") < r.value("final_width_free"));
  p.kappa = 0.0;
  const auto z = run_self_focus(p);
  const auto a = z.table("sn").column("width");
  const auto b = z.table("free").column("width");
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - b[i]) < 1e-10);
}

TEST_CASE("regime boundary and the default mesoscopic packet") {
  const auto& c = pc();
  const auto boundary = regime_classifier(c.planck_mass, c.planck_length, 1e-3 * c.planck_length);
  CHECK(boundary.margin == doctest::Approx(1.0).epsilon(1e-12));
  // 1e-51 * 0.5e-6 = 5e-58 against hbar^2 / G = 1.67e-58
  const auto meso = regime_classifier(1e-17, 0.5e-6, 1e-9);
  CHECK(meso.nonlinear);
  CHECK(meso.margin == doctest::Approx(5e-58 / (c.hbar * c.hbar / c.G)).epsilon(1e-12));
}

TEST_CASE("signalling distance is within half of 1.3 light-years") {
  const auto e = signalling_distance(1e4 * pc().atomic_mass_unit, 1e-6, 1e-6, 1.0, 1.0);
  CHECK(std::abs(e.s_min_lightyears - 1.3) <= 0.65);
}
