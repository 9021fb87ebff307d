#pragma once

#include <cmath>
#include <cstddef>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "atomlight/constants.hpp"
#include "atomlight/interp.hpp"

namespace atomlight {

// Electronic-structure inputs for the dense-lattice regime. Energies are in
// rydberg (|eps_s| = 1 Ry is the single-atom binding energy); distances in
// Bohr radii. Conversion to linewidth units goes through
// PhysicalConstants::rydberg_in_gamma0().

// Large-separation exchange asymptotics of the two-center one-electron
// problem: the gerade/ungerade splitting per manifold, halved to a hopping
// rate. Valid for R >> 1.
inline double hopping_ts_asymptotic(double d_over_a0) {
  const double r = d_over_a0;
  return (4.0 / std::numbers::e) * r * std::exp(-r);  // Ry
}

inline double hopping_tp_asymptotic(double d_over_a0) {
  const double r = d_over_a0;
  const double e = std::numbers::e;
  return r * r * r * std::exp(-r / 2.0) / (8.0 * e * e);  // Ry
}

// Tabulated hopping rates t_s(d), t_p(d) with monotone-cubic interpolation of
// log t against d/a0. Queries outside the tabulated span throw; no
// extrapolation.
class HoppingTable {
 public:
  HoppingTable(std::vector<double> d_over_a0, std::vector<double> t_s_ry,
               std::vector<double> t_p_ry, std::string provenance)
      : r_(std::move(d_over_a0)),
        ts_(std::move(t_s_ry)),
        tp_(std::move(t_p_ry)),
        provenance_(std::move(provenance)) {
    const std::size_t n = r_.size();
    if (n < 4 || ts_.size() != n || tp_.size() != n)
      throw ConfigError("hopping table needs >= 4 rows of equal length");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(ts_[i] > 0.0) || !(tp_[i] > 0.0))
        throw ConfigError("hopping rates must be positive");
      if (i + 1 < n) {
        if (!(r_[i] < r_[i + 1]))
          throw ConfigError("hopping table distances must increase");
        if (!(ts_[i + 1] < ts_[i]) || !(tp_[i + 1] < tp_[i]))
          throw ConfigError("hopping rates must decrease with distance");
      }
    }
    std::vector<double> ls(n), lp(n);
    for (std::size_t i = 0; i < n; ++i) {
      ls[i] = std::log(ts_[i]);
      lp[i] = std::log(tp_[i]);
    }
    log_ts_ = Pchip(r_, ls);
    log_tp_ = Pchip(r_, lp);
  }

  // Default table from the asymptotic laws on d/a0 in [6, 60].
  static HoppingTable asymptotic_default(double r_min = 6.0,
                                         double r_max = 60.0,
                                         double step = 0.5) {
    if (!(r_min > 1.0) || !(r_max > r_min) || !(step > 0.0))
      throw ConfigError("hopping table range must satisfy 1 < r_min < r_max");
    std::vector<double> r, ts, tp;
    for (double x = r_min; x < r_max + step / 2; x += step) {
      const double xr = std::min(x, r_max);
      r.push_back(xr);
      ts.push_back(hopping_ts_asymptotic(xr));
      tp.push_back(hopping_tp_asymptotic(xr));
    }
    return HoppingTable(std::move(r), std::move(ts), std::move(tp),
                        "asymptotic");
  }

  // CSV override. Two accepted headers:
  //   d_over_a0,t_s_ry,t_p_ry            values are hopping rates
  //   d_over_a0,splitting_s_ry,splitting_p_ry   values are level splittings
  // A splitting is the full even/odd gap, i.e. twice the hopping rate.
  static HoppingTable from_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open hopping table: " + path);
    std::string line;
    if (!std::getline(in, line))
      throw ConfigError("empty hopping table: " + path);
    const std::string header = strip(line);
    double scale = 0.0;
    if (header == "d_over_a0,t_s_ry,t_p_ry")
      scale = 1.0;
    else if (header == "d_over_a0,splitting_s_ry,splitting_p_ry")
      scale = 0.5;
    else
      throw ConfigError("unrecognized hopping table header: " + header);
    std::vector<double> r, ts, tp;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
      ++lineno;
      const std::string row = strip(line);
      if (row.empty()) continue;
      std::istringstream ss(row);
      std::string a, b, c;
      if (!std::getline(ss, a, ',') || !std::getline(ss, b, ',') ||
          !std::getline(ss, c))
        throw ConfigError("bad hopping table row " + std::to_string(lineno));
      try {
        r.push_back(std::stod(a));
        ts.push_back(scale * std::stod(b));
        tp.push_back(scale * std::stod(c));
      } catch (const std::exception&) {
        throw ConfigError("bad number in hopping table row " +
                          std::to_string(lineno));
      }
    }
    return HoppingTable(std::move(r), std::move(ts), std::move(tp), path);
  }

  // (t_s, t_p) in Ry at separation d_over_a0; throws outside the table span.
  std::pair<double, double> rates(double d_over_a0) const {
    return {std::exp(log_ts_(d_over_a0)), std::exp(log_tp_(d_over_a0))};
  }

  double r_min() const { return r_.front(); }
  double r_max() const { return r_.back(); }
  const std::string& provenance() const { return provenance_; }
  const std::vector<double>& distances() const { return r_; }
  const std::vector<double>& t_s() const { return ts_; }
  const std::vector<double>& t_p() const { return tp_; }

 private:
  static std::string strip(std::string s) {
    std::string out;
    for (char ch : s)
      if (ch != ' ' && ch != '\t' && ch != '\r') out.push_back(ch);
    return out;
  }

  std::vector<double> r_, ts_, tp_;
  std::string provenance_;
  Pchip log_ts_, log_tp_;
};

// Squared overlap of the shifted ground-state orbital with the relaxed
// one-site ground state entering the hole-doublon matrix element.
inline constexpr double s0_squared = 0.803;

// On-site repulsion of two ground-state electrons and the ground-excited
// repulsion, from the hydrogenic two-electron integrals; exact rationals
// times the single-atom binding energy.
inline constexpr double u_ss_ry = 1.25;
inline constexpr double u_sp_ry = 118.0 / 243.0;

// Weight of the hole-doublon decay channel: (t_s/U_ss)^2 times the
// Brillouin-zone average of the squared transition form factor
// 4 s0^2 (cos kx d + cos ky d)/2. The average is exactly 4 s0^4 on any
// uniform n x n grid with n >= 3.
inline double p_hd(double t_s, double u_ss = u_ss_ry, int bz_n = 64) {
  if (bz_n < 3) throw ConfigError("hole-doublon BZ grid needs n >= 3");
  if (!(u_ss > 0.0)) throw ConfigError("U_ss must be positive");
  double acc = 0.0;
  for (int i = 0; i < bz_n; ++i) {
    const double kx = 2 * pi * i / bz_n;
    for (int j = 0; j < bz_n; ++j) {
      const double ky = 2 * pi * j / bz_n;
      const double gamma_k = 0.5 * (std::cos(kx) + std::cos(ky));
      const double m = 4.0 * s0_squared * gamma_k;
      acc += m * m;
    }
  }
  const double mean = acc / (static_cast<double>(bz_n) * bz_n);
  const double ratio = t_s / u_ss;
  return ratio * ratio * mean;
}

// Derived electronic parameters at one lattice spacing.
struct ChemistryParams {
  double t_s = 0.0;           // Ry
  double t_p = 0.0;           // Ry
  double u_ss = u_ss_ry;      // Ry
  double u_sp = u_sp_ry;      // Ry
  double j_heisenberg = 0.0;  // 4 t_s^2 / U_ss, Ry
  double t_eff = 0.0;         // 2 t_s t_p / U_sp, Ry
  double p_hd = 0.0;          // dimensionless channel weight

  static ChemistryParams from_hoppings(double t_s, double t_p,
                                       int bz_n = 64) {
    if (!(t_s >= 0.0) || !(t_p >= 0.0))
      throw ConfigError("hopping rates must be non-negative");
    ChemistryParams p;
    p.t_s = t_s;
    p.t_p = t_p;
    p.j_heisenberg = 4.0 * t_s * t_s / p.u_ss;
    p.t_eff = 2.0 * t_s * t_p / p.u_sp;
    p.p_hd = atomlight::p_hd(t_s, p.u_ss, bz_n);
    return p;
  }

  static ChemistryParams from_table(const HoppingTable& table,
                                    double d_over_a0, int bz_n = 64) {
    const auto [ts, tp] = table.rates(d_over_a0);
    return from_hoppings(ts, tp, bz_n);
  }

  // t_eff expressed in linewidth units for optical formulas.
  double t_eff_in_gamma0(const PhysicalConstants& c) const {
    return t_eff * c.rydberg_in_gamma0();
  }
};

// Density of excitation eigenstates of the effective Bethe-lattice problem:
// a root site coupled with 2 t_eff to a coordination-4 tree with uniform
// coupling sqrt(3) t_eff. Band |E| <= 2 sqrt(3) t_eff; zero outside.
inline double bethe_dos(double energy, double t_eff) {
  if (!(t_eff > 0.0)) throw ConfigError("bethe_dos needs t_eff > 0");
  const double x = energy / t_eff;
  const double x2 = x * x;
  if (x2 >= 12.0) return 0.0;
  return (2.0 / (pi * t_eff)) * std::sqrt(24.0 - x2) / (16.0 - x2);
}

// Golden-rule escape rate of the root excitation into the tree. The energy
// integral over the band reduces, via E = -2 sqrt(3) t cos(theta) and the
// mixing angle tan(gamma) = 2 tan(theta), to
//   Gamma = (864/pi) t int_0^pi sin^4 cos^2 / (1 + 3 sin^2)^2 dtheta
// whose value is exactly 8 t.
inline double bethe_golden_rule(double t_eff, double quad_tol = 1e-12) {
  if (!(t_eff > 0.0)) throw ConfigError("bethe_golden_rule needs t_eff > 0");
  boost::math::quadrature::tanh_sinh<double> quad;
  const auto f = [](double theta) {
    const double s = std::sin(theta), c = std::cos(theta);
    const double s2 = s * s;
    const double den = 1.0 + 3.0 * s2;
    return s2 * s2 * c * c / (den * den);
  };
  const double integral = quad.integrate(f, 0.0, pi, quad_tol);
  return (864.0 / pi) * integral * t_eff;
}

// Self-energy of the optical excitation from virtual tunneling into the
// Bethe-lattice continuum, resummed to all orders in t_eff. chi is the
// defect-free lattice susceptibility at the drive detuning, in 1/gamma0;
// t_eff in gamma0.
inline Complex sigma_tunneling(double t_eff_gamma0, Complex chi0) {
  const Complex den = I * t_eff_gamma0 * chi0 - 1.0;
  if (std::abs(den) < 1e-12)
    throw ComputeError("tunneling self-energy pole: i t_eff chi == 1");
  return 4.0 * t_eff_gamma0 * t_eff_gamma0 * chi0 / den;
}

// How the two hole-doublon orientations (displacement along x or y) are
// accumulated into the self-energy.
enum class HdCombine { sum, mean };

// Hole-doublon self-energy before channel weighting: each orientation
// contributes the inverse of the sum of the on-site and displaced-site
// susceptibilities.
inline Complex sigma_hole_doublon(Complex chi0, Complex chi_dx,
                                  Complex chi_dy,
                                  HdCombine combine = HdCombine::sum) {
  const Complex dx = chi0 + chi_dx;
  const Complex dy = chi0 + chi_dy;
  if (std::abs(dx) < 1e-300 || std::abs(dy) < 1e-300)
    throw ComputeError("hole-doublon self-energy: vanishing susceptibility");
  Complex s = 1.0 / dx + 1.0 / dy;
  if (combine == HdCombine::mean) s *= 0.5;
  return s;
}

// Total quantum-chemistry self-energy of the driven excitation (the extra
// dephasing -i Gamma'/2 is added by the caller where needed).
inline Complex sigma_qc(Complex chi0, Complex chi_dx, Complex chi_dy,
                        double t_eff_gamma0, double p_hd_weight,
                        HdCombine combine = HdCombine::sum) {
  Complex s = sigma_tunneling(t_eff_gamma0, chi0);
  if (p_hd_weight != 0.0)
    s += p_hd_weight * sigma_hole_doublon(chi0, chi_dx, chi_dy, combine);
  return s;
}

}  // namespace atomlight
