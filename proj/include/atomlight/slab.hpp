#pragma once

#include <cmath>
#include <complex>

#include "atomlight/constants.hpp"
#include "atomlight/lattice2d.hpp"

namespace atomlight {

struct StackCoefficients {
  Complex r{}, t{};
};

// Monolayer (r, t) as a function of the index n instead of the detuning:
// the dispersion relation is solved for the layer denominator, so quantum
// chemistry shifts and extra losses enter only through n itself.
//   t(n) = sin(t0) / [sin(t0) + i(cos(n t0) - cos(t0))],  r = t - 1
// with t0 = k0 dz.
inline StackCoefficients layer_from_index(Complex n, double theta0) {
  const Complex dc = std::cos(n * theta0) - std::cos(theta0);
  const Complex den = std::sin(theta0) + Complex{0.0, 1.0} * dc;
  if (std::abs(den) == 0.0)
    throw ComputeError("monolayer coefficients singular at this index");
  StackCoefficients out;
  out.t = std::sin(theta0) / den;
  out.r = out.t - 1.0;
  return out;
}

namespace detail {

// u_M = sin(M z)/sin(z) = U_{M-1}(cos z); near sin(z) = 0 the ratio is
// evaluated by the Chebyshev recurrence (removable singularity).
inline Complex sine_ratio_u(Complex z, int order) {
  if (order <= 0) return {0.0, 0.0};
  if (order == 1) return {1.0, 0.0};
  const Complex s = std::sin(z);
  if (std::abs(s) > 1e-3) return std::sin(double(order) * z) / s;
  const Complex x = std::cos(z);
  Complex um1{0.0, 0.0}, um{1.0, 0.0};
  for (int k = 1; k < order; ++k) {
    const Complex next = 2.0 * x * um - um1;
    um1 = um;
    um = next;
  }
  return um;
}

}  // namespace detail

// Transmission/reflection of M stacked layers (period dz):
//   t_M = e^{i t0} t / [u_M - e^{i t0} t u_{M-1}]
//   r_M = e^{2i t0} r u_M / [u_M - e^{i t0} t u_{M-1}]
// For thick absorbing stacks (Im(M n t0) large) the semi-infinite limit is
// used to avoid overflow of u_M.
inline StackCoefficients stack_t_r(Complex n, int layer_count,
                                   const LatticeGeometry& geom,
                                   const PhysicalConstants& consts) {
  if (layer_count < 1) throw ConfigError("stack needs at least one layer");
  const double theta0 = consts.k0() * geom.dz;
  const auto layer = layer_from_index(n, theta0);
  const Complex phase = std::exp(Complex{0.0, theta0});
  const Complex z = n * theta0;

  if (layer_count * std::abs(z.imag()) > 600.0) {
    // u_{M-1}/u_M -> e^{iz}; t_M decays below double range
    const Complex den = 1.0 - phase * layer.t * std::exp(Complex{0.0, 1.0} * z);
    return {phase * phase * layer.r / den, Complex{0.0, 0.0}};
  }

  const Complex um = detail::sine_ratio_u(z, layer_count);
  const Complex um1 = detail::sine_ratio_u(z, layer_count - 1);
  const Complex den = um - phase * layer.t * um1;
  if (std::abs(den) == 0.0)
    throw ComputeError("stack response singular (resonance pole)");
  return {phase * phase * layer.r * um / den, phase * layer.t / den};
}

// Scattering composition of two sub-stacks; the back-side reflection of a
// block under this phase convention is r e^{-2i t0}.
inline StackCoefficients compose_stacks(const StackCoefficients& a,
                                        const StackCoefficients& b,
                                        double theta0) {
  const Complex a_back = a.r * std::exp(Complex{0.0, -2.0 * theta0});
  const Complex den = 1.0 - a_back * b.r;
  if (std::abs(den) == 0.0)
    throw ComputeError("stack composition singular (resonance pole)");
  return {a.r + a.t * a.t * b.r / den, a.t * b.t / den};
}

// Classical slab of length L and index n:
//   t = 4n e^{i n k0 L} / [(1+n)^2 - e^{2i n k0 L}(n-1)^2]
//   r = (n^2-1)(e^{2i n k0 L} - 1) / [same]
inline StackCoefficients fresnel_t_r(Complex n, double length,
                                     const PhysicalConstants& consts) {
  if (!(length > 0)) throw ConfigError("slab length must be positive");
  const Complex e = std::exp(Complex{0.0, 1.0} * n * consts.k0() * length);
  const Complex den = (1.0 + n) * (1.0 + n) - e * e * (n - 1.0) * (n - 1.0);
  if (std::abs(den) == 0.0)
    throw ComputeError("Fresnel denominator vanishes");
  return {(n * n - 1.0) * (e * e - 1.0) / den, 4.0 * n * e / den};
}

// Max over {t, r} of the relative deviation between the M-layer stack and
// the Fresnel slab of equal optical length L = M dz.
inline double fresnel_agreement(Complex n, int layer_count,
                                const LatticeGeometry& geom,
                                const PhysicalConstants& consts) {
  const auto stack = stack_t_r(n, layer_count, geom, consts);
  const auto fresnel = fresnel_t_r(n, layer_count * geom.dz, consts);
  const double err_t = std::abs(stack.t - fresnel.t) / std::abs(fresnel.t);
  const double err_r = std::abs(stack.r - fresnel.r) / std::abs(fresnel.r);
  return std::max(err_t, err_r);
}

// Single-resonance Drude-Lorentz description, valid once quantum chemistry
// losses dominate the collective linewidth (-2 Im Sigma_QC >~ Gamma(0)).
struct DrudeLorentzParams {
  double omega_res = 0;    // rad/s
  double gamma_damp = 0;   // rad/s
  double f_res = 0;        // oscillator strength
  double omega_p = 0;      // rad/s, plasma frequency of density 1/(d^2 dz)
  // same data in gamma0 units relative to the bare transition
  double delta_res = 0;    // (omega_res - omega_0)/gamma0
  double gamma_damp_g0 = 0;
  double strength = 0;     // f_res omega_p^2/omega_res in gamma0 units
};

// Resonant-form index: n = sqrt(1 - S/(2(delta - delta_res) + i gamma')).
inline Complex drude_lorentz_index(double delta,
                                   const DrudeLorentzParams& p) {
  const Complex den =
      2.0 * (delta - p.delta_res) + Complex{0.0, p.gamma_damp_g0};
  Complex n = std::sqrt(1.0 - p.strength / den);
  if (n.imag() < 0) n = -n;
  return n;
}

// Parameter extraction: omega_res = omega_0 + omega(0) + Re Sigma_QC,
// gamma' = Gamma' - 2 Im Sigma_QC, f_res omega_p^2/omega_res = 2Gamma(0)/(k0 dz).
inline DrudeLorentzParams drude_lorentz_map(const Lattice2D& lattice,
                                            Complex sigma_qc,
                                            double gamma_prime = 0.0) {
  const auto& g = lattice.geometry();
  const auto& c = lattice.constants();
  DrudeLorentzParams p;
  p.delta_res = lattice.omega0() + sigma_qc.real();
  p.gamma_damp_g0 = gamma_prime - 2.0 * sigma_qc.imag();
  p.omega_res = c.omega0() + p.delta_res * c.gamma0;
  p.gamma_damp = p.gamma_damp_g0 * c.gamma0;
  p.omega_p = std::sqrt(si::e_charge * si::e_charge /
                        (si::m_e * si::eps0 * g.d * g.d * g.dz));
  p.strength = 2.0 * lattice.gamma0_collective() / (c.k0() * g.dz);
  p.f_res = p.strength * c.gamma0 * p.omega_res / (p.omega_p * p.omega_p);
  return p;
}

}  // namespace atomlight
