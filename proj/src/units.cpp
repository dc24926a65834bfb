#include "snlab/units.hpp"

#include <cmath>
#include <string>

#include "snlab/errors.hpp"

namespace snlab {

const PhysicalConstants& PhysicalConstants::codata2018() {
  static const PhysicalConstants pc = [] {
    PhysicalConstants p{};
    p.G = 6.67430e-11;
    p.hbar = 1.054571817e-34;
    p.c = 299792458.0;
    p.kB = 1.380649e-23;
    p.atomic_mass_unit = 1.66053906660e-27;
    p.proton_mass = 1.67262192369e-27;
    p.planck_mass = std::sqrt(p.hbar * p.c / p.G);
    p.planck_length = std::sqrt(p.hbar * p.G / (p.c * p.c * p.c));
    return p;
  }();
  return pc;
}

UnitSystem make_unit_system(double mass_kg, double length_m, const PhysicalConstants& pc) {
  if (!(mass_kg > 0.0) || !std::isfinite(mass_kg)) {
    throw InvalidArgument("mass must be positive and finite, got " + std::to_string(mass_kg));
  }
  if (!(length_m > 0.0) || !std::isfinite(length_m)) {
    throw InvalidArgument("length must be positive and finite, got " + std::to_string(length_m));
  }
  UnitSystem u{};
  u.length_scale = length_m;
  u.mass = mass_kg;
  u.time_scale = mass_kg * length_m * length_m / pc.hbar;
  // Written as ((G m) m) m L / hbar / hbar so intermediate values stay in range.
  u.kappa = pc.G * mass_kg * mass_kg * mass_kg * length_m / pc.hbar / pc.hbar;
  return u;
}

}  // namespace snlab
