#pragma once

namespace snlab {

/// CODATA-2018 constants in SI units. Planck mass and length are derived from
/// the stored G, hbar and c so that the Planck identities hold to rounding.
struct PhysicalConstants {
  double G;                 // m^3 kg^-1 s^-2
  double hbar;              // J s
  double c;                 // m s^-1
  double kB;                // J K^-1
  double planck_mass;       // kg
  double planck_length;     // m
  double atomic_mass_unit;  // kg
  double proton_mass;       // kg

  static const PhysicalConstants& codata2018();
};

/// Julian light-year in metres (IAU, exact).
inline constexpr double kLightYearMetres = 9460730472580800.0;

}  // namespace snlab
