#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace atomlight {

using Complex = std::complex<double>;
inline constexpr double pi = std::numbers::pi;
inline constexpr Complex I{0.0, 1.0};

// CODATA 2018 values, SI.
namespace si {
inline constexpr double hbar = 1.054571817e-34;      // J s
inline constexpr double c = 2.99792458e8;            // m/s
inline constexpr double e_charge = 1.602176634e-19;  // C
inline constexpr double m_e = 9.1093837015e-31;      // kg
inline constexpr double eps0 = 8.8541878128e-12;     // F/m
}  // namespace si

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ComputeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Atomic/transition constants. Defaults: hydrogen 1s-2p (Lyman alpha).
// Internal unit conventions everywhere downstream:
//   lengths multiplied by k0 (dimensionless), rates in units of gamma0,
//   chemistry energies in Rydberg (|epsilon_s|).
struct PhysicalConstants {
  double lambda0 = 121.567e-9;          // transition wavelength, m
  double gamma0 = 2 * pi * 100.0e6;     // free-space linewidth, rad/s
  double epsilon_s = -13.605693122994;  // s-orbital binding energy, eV
  double a0 = 52.9177210903e-12;        // Bohr radius, m

  double k0() const { return 2 * pi / lambda0; }
  double omega0() const { return k0() * si::c; }

  // 1 Rydberg (= |epsilon_s|) expressed in gamma0 units.
  double rydberg_in_gamma0() const {
    return std::abs(epsilon_s) * si::e_charge / (si::hbar * gamma0);
  }
  // Transition frequency omega0 in gamma0 units.
  double omega0_in_gamma0() const { return omega0() / gamma0; }

  void validate() const {
    if (!(lambda0 > 0) || !(gamma0 > 0) || !(a0 > 0))
      throw ConfigError("constants: lambda0, gamma0, a0 must be positive");
    if (!(epsilon_s < 0))
      throw ConfigError("constants: epsilon_s must be negative (bound state)");
  }
};

// Square lattice of spacing d in-plane, layer spacing dz along propagation.
struct LatticeGeometry {
  double d = 0;   // in-plane lattice constant, m
  double dz = 0;  // longitudinal lattice constant, m

  double aspect() const { return dz / d; }

  static LatticeGeometry from_lambda0(double d_over_lambda0, double aspect,
                                      const PhysicalConstants& c) {
    return {d_over_lambda0 * c.lambda0, d_over_lambda0 * aspect * c.lambda0};
  }
  static LatticeGeometry from_bohr(double d_over_a0, double aspect,
                                   const PhysicalConstants& c) {
    return {d_over_a0 * c.a0, d_over_a0 * aspect * c.a0};
  }

  void validate(const PhysicalConstants& c) const {
    if (!(d > 0) || !(dz > 0))
      throw ConfigError("geometry: d and dz must be positive");
    if (!(d < c.lambda0))
      throw ConfigError("geometry: need d < lambda0 (single diffraction order)");
  }
};

}  // namespace atomlight
