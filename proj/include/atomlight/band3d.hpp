#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "atomlight/constants.hpp"
#include "atomlight/lattice2d.hpp"

namespace atomlight {

// Longitudinal band structure of the layered 3D lattice and the complex
// refractive index obtained by inverting it. Rates in gamma0 units.
struct InvertibilityReport {
  double coeff_a = 0;                    // A(dz/d)
  double coeff_b = 0;                    // B(dz/d)
  double threshold_d_over_lambda0 = 0;   // analytic non-invertibility bound
  double ev_ratio_max = 0;               // max |J_ev/J_1D| ~ (lambda0/dz)^2 B/pi
  bool analytic_non_invertible = false;  // d/lambda0 below the bound
  bool scan_non_invertible = false;      // interior extremum found numerically
  bool is_invertible() const { return !scan_non_invertible; }
};

struct IndexResult {
  double delta = 0;
  Complex n{1.0, 0.0};
  bool in_bandgap = false;
  Complex sigma_qc{};
  double gamma_prime = 0;
};

namespace detail {

// One evanescent diffraction order g_mn = (2pi/d)(m,n), |g_mn| > k0.
struct EvMode {
  double ratio;   // [(g.x/k0)^2 - 1]/sqrt(|g/k0|^2 - 1)
  double cosh_q;  // cosh(k0 dz sqrt(|g/k0|^2 - 1))
  double sinh_q;
};

inline std::vector<EvMode> make_ev_modes(const LatticeGeometry& geom,
                                         const PhysicalConstants& consts,
                                         int cutoff) {
  const double lod = consts.lambda0 / geom.d;  // |g_mn|/k0 = lod sqrt(m^2+n^2)
  const double theta0 = consts.k0() * geom.dz;
  std::vector<EvMode> modes;
  for (int m = -cutoff; m <= cutoff; ++m) {
    for (int n = -cutoff; n <= cutoff; ++n) {
      if (m == 0 && n == 0) continue;
      const double g2 = lod * lod * (m * m + n * n);
      if (g2 <= 1.0)
        throw ComputeError(
            "diffraction order not evanescent; geometry requires d < lambda0");
      const double q = std::sqrt(g2 - 1.0);
      const double arg = theta0 * q;
      if (arg > 45.0) continue;  // contribution below 1e-16 of leading order
      modes.push_back({(lod * lod * m * m - 1.0) / q, std::cosh(arg),
                       std::sinh(arg)});
    }
  }
  return modes;
}

// Dimensionless evanescent band term J_ev at Bloch phase cos(kz dz).
inline double j_ev_of_modes(double cos_kzdz, const std::vector<EvMode>& modes) {
  double sum = 0.0;
  for (const auto& m : modes)
    sum += m.ratio * (1.0 + m.sinh_q / (cos_kzdz - m.cosh_q));
  return -sum;
}

// Sign factor of dJ/dkz (common positive factor dz sin(kz dz) removed).
inline double band_slope_factor(double cos_kzdz, double theta0,
                                const std::vector<EvMode>& modes) {
  const double c0 = std::cos(theta0);
  double f = std::sin(theta0) / ((cos_kzdz - c0) * (cos_kzdz - c0));
  for (const auto& m : modes)
    f -= m.ratio * m.sinh_q /
         ((cos_kzdz - m.cosh_q) * (cos_kzdz - m.cosh_q));
  return f;
}

// A (with_cosh false) and B (true) aspect-ratio sums of the thin-layer
// expansion of J_ev; 1 - tanh(y) is evaluated as 2/(e^{2y}+1) to avoid
// cancellation.
inline double ev_coefficient(double a, bool with_cosh) {
  const int cutoff = 48;
  double sum = 0.0;
  for (int m = -cutoff; m <= cutoff; ++m) {
    for (int n = -cutoff; n <= cutoff; ++n) {
      if (m == 0 && n == 0) continue;
      const double rho = std::sqrt(double(m) * m + double(n) * n);
      const double y = 2.0 * pi * a * rho;
      const double factor =
          with_cosh ? std::tanh(y) / std::cosh(std::min(y, 700.0))
                    : 2.0 / (std::exp(std::min(2.0 * y, 1400.0)) + 1.0);
      sum += (double(m) * m / rho) * factor;
    }
  }
  return a * sum;
}

}  // namespace detail

// Invertibility of J(kz) from geometry alone (no lattice sums needed):
// analytic thin-layer bound plus a numerical scan for interior extrema of
// the band between the light line and the zone edge.
inline InvertibilityReport analyze_invertibility(
    const LatticeGeometry& geom, const PhysicalConstants& consts,
    int mn_cutoff = 12) {
  geom.validate(consts);
  InvertibilityReport rep;
  const double a = geom.aspect();
  rep.coeff_a = detail::ev_coefficient(a, false);
  rep.coeff_b = detail::ev_coefficient(a, true);
  rep.threshold_d_over_lambda0 = (1.0 / a) * std::sqrt(2.0 * rep.coeff_b / pi);
  rep.analytic_non_invertible =
      geom.d / consts.lambda0 < rep.threshold_d_over_lambda0;
  const double lam_over_dz = consts.lambda0 / geom.dz;
  rep.ev_ratio_max = lam_over_dz * lam_over_dz * rep.coeff_b / pi;

  const auto modes = detail::make_ev_modes(geom, consts, mn_cutoff);
  const double theta0 = consts.k0() * geom.dz;
  const double c0 = std::cos(theta0);
  const int samples = 4096;
  for (int i = 1; i < samples; ++i) {
    const double ct = std::cos(pi * i / samples);
    if (std::abs(ct - c0) < 1e-9) continue;  // light line
    if (detail::band_slope_factor(ct, theta0, modes) <= 0.0) {
      rep.scan_non_invertible = true;
      break;
    }
  }
  return rep;
}

class OpticalBand3D {
 public:
  explicit OpticalBand3D(const Lattice2D& lattice, int mn_cutoff = 12)
      : lat_(lattice), mn_cutoff_(mn_cutoff) {
    const auto& g = lat_.geometry();
    const auto& c = lat_.constants();
    if (!(g.dz > 0) || !(g.dz < c.lambda0))
      throw ConfigError("interlayer constant must lie in (0, lambda0)");
    theta0_ = c.k0() * g.dz;
    modes_ = detail::make_ev_modes(g, c, mn_cutoff_);
    report_ = analyze_invertibility(g, c, mn_cutoff_);
  }

  const Lattice2D& lattice() const { return lat_; }
  double omega0() const { return lat_.omega0(); }
  double gamma0() const { return lat_.gamma0_collective(); }
  const InvertibilityReport& invertibility() const { return report_; }

  // omega(0) + (Gamma(0)/2) sin(k0 dz)/(cos(kz dz) - cos(k0 dz));
  // the pole at kz = k0 (light line) is rejected.
  double j_radiative(double kz) const {
    const double den = std::cos(kz * lat_.geometry().dz) - std::cos(theta0_);
    if (std::abs(den) < 1e-12)
      throw ComputeError("band evaluated on the light line kz = k0");
    return omega0() + 0.5 * gamma0() * std::sin(theta0_) / den;
  }

  // (Gamma(0)/2) J_ev(kz): evanescent diffraction orders of each layer;
  // terms fall off like exp(-2 pi sqrt(m^2+n^2) dz/d).
  double j_evanescent(double kz) const {
    return 0.5 * gamma0() * j_ev_reduced(kz);
  }

  double j_total(double kz) const { return j_radiative(kz) + j_evanescent(kz); }

  // Dimensionless J_ev, truncated at |m|,|n| <= cutoff (0: default cutoff).
  double j_ev_reduced(double kz, int cutoff = 0) const {
    const double ct = std::cos(kz * lat_.geometry().dz);
    if (cutoff <= 0 || cutoff == mn_cutoff_)
      return detail::j_ev_of_modes(ct, modes_);
    const auto modes =
        detail::make_ev_modes(lat_.geometry(), lat_.constants(), cutoff);
    return detail::j_ev_of_modes(ct, modes);
  }

  struct BandPoint {
    double kz, j_rad, j_ev, j_tot;
  };

  std::vector<BandPoint> band_curve(int n_points) const {
    std::vector<BandPoint> out;
    out.reserve(n_points);
    const double kz_max = pi / lat_.geometry().dz;
    const double k0 = lat_.constants().k0();
    for (int i = 0; i < n_points; ++i) {
      const double kz = kz_max * (i + 0.5) / n_points;
      if (std::abs(kz - k0) < 1e-9 * k0) continue;
      const double jr = j_radiative(kz);
      const double je = j_evanescent(kz);
      out.push_back({kz, jr, je, jr + je});
    }
    return out;
  }

  // Detuning of the band edge kz = pi/dz. The index formula inverts the
  // radiative part of the band, so by default the evanescent correction is
  // left out and refractive_index() at the returned detuning lands on
  // n = lambda0/(2 dz) exactly; the edge is biased a few ulp into the gap so
  // the arccos argument cannot round to just above -1. With
  // include_evanescent the full J(pi/dz) is returned instead.
  double band_edge_detuning(bool include_evanescent = false) const {
    require_invertible();
    const double kz_edge = pi / lat_.geometry().dz;
    if (include_evanescent)
      return j_radiative(kz_edge) + j_evanescent(kz_edge);
    const double shift =
        0.5 * gamma0() * std::sin(theta0_) / (1.0 + std::cos(theta0_));
    const double eps = std::numeric_limits<double>::epsilon();
    const double bias = 4.0 * eps * (std::abs(omega0()) + shift);
    return omega0() - shift + bias;
  }

  // n(delta) = (1/k0 dz) arccos[cos(k0 dz) +
  //            Gamma(0) sin(k0 dz)/(2(delta - omega(0) - Sigma) + i Gamma')]
  // on the branch Re n in [0, pi/(k0 dz)], Im n >= 0 (decaying forward wave).
  IndexResult refractive_index(double delta, Complex sigma_qc = {},
                               double gamma_prime = 0.0) const {
    require_invertible();
    if (gamma_prime < 0) throw ConfigError("gamma_prime must be >= 0");
    const Complex den =
        2.0 * (delta - omega0() - sigma_qc) + Complex{0.0, gamma_prime};
    const double s = std::sin(theta0_), c = std::cos(theta0_);
    const Complex w = c + gamma0() * s / den;
    Complex n = std::acos(w) / theta0_;
    if (n.imag() < 0) n = std::conj(n);  // decaying branch for real |w| > 1

    IndexResult res;
    res.delta = delta;
    res.sigma_qc = sigma_qc;
    res.gamma_prime = gamma_prime;
    res.n = n;
    // gap flag from the lossless (real-denominator) argument
    const double den_re = 2.0 * (delta - omega0() - sigma_qc.real());
    const double w_re = (den_re == 0.0)
                            ? std::numeric_limits<double>::infinity()
                            : c + gamma0() * s / den_re;
    res.in_bandgap = std::abs(w_re) > 1.0;
    return res;
  }

 private:
  void require_invertible() const {
    if (report_.scan_non_invertible)
      throw ComputeError(
          "band is non-invertible at this geometry; index undefined");
  }

  Lattice2D lat_;
  int mn_cutoff_;
  double theta0_;
  std::vector<detail::EvMode> modes_;
  InvertibilityReport report_;
};

}  // namespace atomlight
