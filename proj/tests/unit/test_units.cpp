#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "snlab/errors.hpp"
#include "snlab/grid.hpp"
#include "snlab/summation.hpp"
#include "snlab/units.hpp"

using namespace snlab;

TEST_CASE("planck mass at the planck length has unit coupling") {
  const auto& pc = PhysicalConstants::codata2018();
  const UnitSystem u = make_unit_system(pc.planck_mass, pc.planck_length);
  CHECK(u.kappa == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("coupling, time and energy scales by hand") {
  const double G = 6.67430e-11, hbar = 1.054571817e-34;
  const double m = 1e-17, L = 0.5e-6;
  const UnitSystem u = make_unit_system(m, L);
  CHECK(u.kappa == doctest::Approx(G * m * m * m * L / (hbar * hbar)).epsilon(1e-13));
  CHECK(u.kappa == doctest::Approx(3.0007).epsilon(1e-4));
  CHECK(u.time_scale == doctest::Approx(m * L * L / hbar).epsilon(1e-14));
  CHECK(u.energy_scale() == doctest::Approx(hbar * hbar / (m * L * L)).epsilon(1e-14));
}

TEST_CASE("coupling scales as m^3 L") {
  const UnitSystem a = make_unit_system(2e-17, 1e-6);
  const UnitSystem b = make_unit_system(1e-17, 0.5e-6);
  CHECK(a.kappa / b.kappa == doctest::Approx(16.0).epsilon(1e-13));
}

TEST_CASE("unit conversions round trip") {
  const UnitSystem u = make_unit_system(1.3e-20, 2.1e-7);
  for (double x : {1e-9, 0.25, 3.0, 1e4}) {
    CHECK(u.length_from_si(u.length_to_si(x)) == doctest::Approx(x).epsilon(1e-15));
    CHECK(u.time_from_si(u.time_to_si(x)) == doctest::Approx(x).epsilon(1e-15));
  }
  CHECK(u.velocity_to_si(1.0) == doctest::Approx(u.length_scale / u.time_scale));
}

TEST_CASE("non-positive unit inputs are rejected") {
  CHECK_THROWS_AS(make_unit_system(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_unit_system(-1.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(make_unit_system(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(make_unit_system(1.0, std::nan("")), InvalidArgument);
}

TEST_CASE("grid coordinates put the origin on index n/2") {
  const Grid g = Grid::with_box(1, 16, 8.0);
  CHECK(g.spacing() == 0.5);
  CHECK(g.coordinate(8) == 0.0);
  CHECK(g.coordinate(0) == -4.0);
  CHECK(g.coordinate(15) == 3.5);
  CHECK(g.size() == 16);
}

TEST_CASE("grid wavenumbers follow FFT ordering") {
  const Grid g = Grid::with_box(1, 8, 2.0 * std::numbers::pi);
  const double expected[8] = {0, 1, 2, 3, 4, -3, -2, -1};
  for (int j = 0; j < 8; ++j) CHECK(std::abs(g.wavenumber(j)) == doctest::Approx(std::abs(expected[j])));
  for (int j = 1; j < 4; ++j) CHECK(g.wavenumber(j) == doctest::Approx(expected[j]));
}

TEST_CASE("3D flat index is row-major with axis 0 slowest") {
  const Grid g = Grid::with_box(3, 8, 8.0);
  CHECK(g.size() == 512);
  const auto idx = g.unflatten((1 * 8 + 2) * 8 + 3);
  CHECK(idx[0] == 1);
  CHECK(idx[1] == 2);
  CHECK(idx[2] == 3);
  const auto r = g.position((1 * 8 + 2) * 8 + 3);
  CHECK(r[0] == -3.0);
  CHECK(r[1] == -2.0);
  CHECK(r[2] == -1.0);
  CHECK(g.cell_volume() == 1.0);
  CHECK(g.box_volume() == 512.0);
}

TEST_CASE("invalid grids are rejected") {
  CHECK_THROWS_AS(Grid(2, 8, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid(1, 0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid(1, 6, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid(1, 9, 1.0), InvalidArgument);
  CHECK_THROWS_AS(Grid(1, 8, -1.0), InvalidArgument);
}

TEST_CASE("pairwise summation agrees with long double accumulation") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(100000);
  long double ref = 0.0L;
  for (auto& x : v) {
    x = u(rng) * 1e6 + u(rng);
    ref += x;
  }
  const double s = pairwise_sum<double>(v.size(), [&](std::size_t i) { return v[i]; });
  CHECK(std::abs(s - static_cast<double>(ref)) < 1e-6);
}
