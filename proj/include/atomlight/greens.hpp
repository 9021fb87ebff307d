#pragma once

#include <cmath>

#include "atomlight/constants.hpp"

namespace atomlight {

struct Vec3 {
  double x = 0, y = 0, z = 0;
  double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
};

// x-projected dyadic Green's function x' G(r) x' for an x-polarized dipole,
// in the convention where the dipole-dipole coupling is -gamma0 * green_xx
// and Im green_xx -> 1/2 as r -> 0 (single-atom decay gamma0).
// r in the length units of 1/k0.
inline Complex green_xx(const Vec3& r, double k0) {
  const double rn = r.norm();
  if (!(rn > 0)) throw ComputeError("green_xx: r = 0 is singular");
  const double x = k0 * rn;
  const double u = (r.x * r.x) / r.norm2();  // (x_hat . r_hat)^2
  const double ix1 = 1.0 / x, ix2 = ix1 * ix1, ix3 = ix2 * ix1;
  const Complex iso{ix1 - ix3, ix2};           // 1/x + i/x^2 - 1/x^3
  const Complex axial{-ix1 + 3 * ix3, -3 * ix2};  // -1/x - 3i/x^2 + 3/x^3
  return 0.75 * std::exp(Complex{0, x}) * (iso + u * axial);
}

// Longitudinal (quasistatic 1/r^3) part; purely real.
inline Complex green_xx_longitudinal(const Vec3& r, double k0) {
  const double rn = r.norm();
  if (!(rn > 0)) throw ComputeError("green_xx_longitudinal: r = 0 is singular");
  const double x = k0 * rn;
  const double u = (r.x * r.x) / r.norm2();
  return Complex{0.75 * (3 * u - 1) / (x * x * x), 0.0};
}

inline Complex green_xx_transverse(const Vec3& r, double k0) {
  return green_xx(r, k0) - green_xx_longitudinal(r, k0);
}

}  // namespace atomlight
