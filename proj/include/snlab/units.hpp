#pragma once

#include "snlab/constants.hpp"

namespace snlab {

/// Dimensionless units with hbar = m = 1. A length of one internal unit is
/// `length_scale` metres and a time of one internal unit is `time_scale` seconds;
/// the Newtonian self-coupling becomes kappa = G m^3 L / hbar^2.
struct UnitSystem {
  double length_scale;  // m
  double mass;          // kg
  double time_scale;    // s
  double kappa;         // dimensionless

  double energy_scale(const PhysicalConstants& pc = PhysicalConstants::codata2018()) const {
    return pc.hbar * pc.hbar / (mass * length_scale * length_scale);
  }

  double length_to_si(double x) const { return x * length_scale; }
  double length_from_si(double x_m) const { return x_m / length_scale; }
  double time_to_si(double t) const { return t * time_scale; }
  double time_from_si(double t_s) const { return t_s / time_scale; }
  double velocity_to_si(double v) const { return v * length_scale / time_scale; }
};

/// Throws InvalidArgument for non-positive inputs.
UnitSystem make_unit_system(double mass_kg, double length_m,
                            const PhysicalConstants& pc = PhysicalConstants::codata2018());

}  // namespace snlab
