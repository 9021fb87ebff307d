#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "atomlight/chemistry.hpp"
#include "atomlight/constants.hpp"
#include "atomlight/greens.hpp"
#include "atomlight/interp.hpp"
#include "atomlight/lattice2d.hpp"
#include "atomlight/toeplitz.hpp"

namespace atomlight {

// Quadratic damping ramp switched on outside r_cutoff; reaches
// 3 gamma_collective at r = (3/2) r_cutoff, the array edge.
inline double absorbing_profile(double r, double r_cutoff,
                                double gamma_collective) {
  if (r <= r_cutoff) return 0.0;
  const double s = (r - r_cutoff) / (r_cutoff / 2.0);
  return 3.0 * gamma_collective * s * s;
}

// Half-span (site shells from center to edge) of a centered finite box.
// The absorbing onset (2/3) l must reach lambda0/2 so guided modes down to
// |k| ~ 2 k0 are sampled; coarse lattices additionally keep at least 100
// shells (N >= 4e4) so the box stays large in units of d. A site budget
// caps the span for very small d.
inline int recommended_half_span(double d, double lambda0,
                                 long site_budget = 100000) {
  if (!(d > 0.0) || !(lambda0 > 0.0))
    throw ConfigError("lattice constant and wavelength must be positive");
  if (site_budget < 9) throw ConfigError("site budget below a 3x3 array");
  const int m_rc = static_cast<int>(std::ceil(0.75 * lambda0 / d - 1e-12));
  const int m_cap =
      (static_cast<int>(std::floor(std::sqrt(double(site_budget)))) - 1) / 2;
  return std::min(std::max(m_rc, 100), m_cap);
}

// Absorbing onset radius matching recommended_half_span: rc = (2/3) l with
// l = m d. Falls below lambda0/2 only when the site budget truncates m.
inline double recommended_r_cutoff(double d, double lambda0,
                                   long site_budget = 100000) {
  return (2.0 / 3.0) * recommended_half_span(d, lambda0, site_budget) * d;
}

// Finite square array spanning [-l, l]^2 with a site at the origin, driven
// through a sparse set of Rabi amplitudes. All rates in gamma0 units.
struct FiniteArrayProblem {
  LatticeGeometry geom;
  double half_size_l = 0.0;
  double r_cutoff = 0.0;
  std::vector<std::pair<int, Complex>> drive;  // flat site index -> Omega
  double delta = 0.0;

  int half_span() const {
    return static_cast<int>(std::floor(half_size_l / geom.d + 1e-9));
  }
  int side() const { return 2 * half_span() + 1; }
  int atom_count() const { return side() * side(); }

  // Flat index of lattice site (i, j) counted from the center atom.
  int flat_index(int i, int j) const {
    const int m = half_span();
    if (std::abs(i) > m || std::abs(j) > m)
      throw ConfigError("site offset outside the finite array");
    return (i + m) * side() + (j + m);
  }

  // Canonical center-driven problem: r_cutoff >= lambda0/2 and the array
  // extends half the cutoff length beyond it.
  static FiniteArrayProblem center_driven(const LatticeGeometry& geom,
                                          const PhysicalConstants& consts,
                                          double delta,
                                          double r_cutoff = 0.0) {
    FiniteArrayProblem p;
    p.geom = geom;
    p.r_cutoff = (r_cutoff > 0.0) ? r_cutoff : consts.lambda0 / 2.0;
    p.half_size_l = 1.5 * p.r_cutoff;
    p.delta = delta;
    p.drive = {{p.flat_index(0, 0), Complex{1.0, 0.0}}};
    p.validate(consts);
    return p;
  }

  void validate(const PhysicalConstants& consts) const {
    geom.validate(consts);
    if (!(half_size_l > 0.0) || !(r_cutoff > 0.0))
      throw ConfigError("array size and cutoff must be positive");
    if (std::abs(r_cutoff - (2.0 / 3.0) * half_size_l) >
        1e-9 * half_size_l)
      throw ConfigError("absorbing onset must sit at 2/3 of the half size");
    if (r_cutoff < consts.lambda0 / 2.0 * (1.0 - 1e-12))
      throw ConfigError("absorbing onset must be at least lambda0/2");
    if (!std::isfinite(delta)) throw ConfigError("detuning must be finite");
  }
};

struct FiniteArraySolution {
  std::vector<Complex> amplitudes;
  double residual_norm = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::string method;
};

// Steady state of the driven dipole lattice: solves [delta I - M] c = -Omega
// with M_jj = -i (1 + Gamma'_cutoff(r_j))/2 and M_jk = -green_xx(R_j - R_k).
// The FFT matvec exploits the doubly-Toeplitz structure of the coupling. The
// grid and absorber are fixed at construction; delta and the drive vary per
// solve, so kernel transforms are reused across a detuning sweep.
class FiniteArraySolver {
 public:
  FiniteArraySolver(const LatticeGeometry& geom, const PhysicalConstants& consts,
                    double half_size_l, double r_cutoff)
      : geom_(geom), consts_(consts), half_size_l_(half_size_l),
        r_cutoff_(r_cutoff) {
    geom.validate(consts);
    if (!(half_size_l > 0.0) || !(r_cutoff > 0.0))
      throw ConfigError("array size and cutoff must be positive");
    m_ = static_cast<int>(std::floor(half_size_l / geom.d + 1e-9));
    side_ = 2 * m_ + 1;
    count_ = side_ * side_;
    const double k0 = consts.k0();
    const double d = geom.d;
    conv_ = std::make_unique<ToeplitzConvolver2D>(
        side_, [&](int di, int dj) -> Complex {
          if (di == 0 && dj == 0) return Complex{0.0, 0.0};
          return green_xx(Vec3{di * d, dj * d, 0.0}, k0);
        });
    const double gc = 3.0 * consts.lambda0 * consts.lambda0 / (4 * pi * d * d);
    damping_.resize(count_);
    for (int i = -m_; i <= m_; ++i)
      for (int j = -m_; j <= m_; ++j) {
        const double r = d * std::sqrt(double(i) * i + double(j) * j);
        damping_[static_cast<std::size_t>(i + m_) * side_ + (j + m_)] =
            0.5 * (1.0 + absorbing_profile(r, r_cutoff, gc));
      }
  }

  static FiniteArraySolver for_problem(const FiniteArrayProblem& p,
                                       const PhysicalConstants& consts) {
    p.validate(consts);
    return FiniteArraySolver(p.geom, consts, p.half_size_l, p.r_cutoff);
  }

  int half_span() const { return m_; }
  int side() const { return side_; }
  int atom_count() const { return count_; }
  double achieved_r_cutoff() const { return r_cutoff_; }
  int flat_index(int i, int j) const {
    if (std::abs(i) > m_ || std::abs(j) > m_)
      throw ConfigError("site offset outside the finite array");
    return (i + m_) * side_ + (j + m_);
  }
  int center_index() const { return flat_index(0, 0); }

  // y = [delta I - M] x.
  void apply(double delta, const std::vector<Complex>& x,
             std::vector<Complex>& y) const {
    y.resize(x.size());
    conv_->apply(x.data(), y.data());
    for (int s = 0; s < count_; ++s)
      y[s] += (delta + I * damping_[s]) * x[s];
  }

  // Matrix-free BiCGSTAB with right Jacobi preconditioning (the iterated
  // residual is then the true residual). Warm start optional.
  FiniteArraySolution solve(double delta,
                            const std::vector<std::pair<int, Complex>>& drive,
                            const std::vector<Complex>* warm = nullptr,
                            double tol = 1e-10, int max_iter = 20000) const {
    if (drive.empty()) throw ConfigError("drive must be non-empty");
    if (!std::isfinite(delta)) throw ConfigError("detuning must be finite");
    const std::size_t n = static_cast<std::size_t>(count_);
    std::vector<Complex> b(n, Complex{0.0, 0.0});
    for (const auto& [site, omega] : drive) {
      if (site < 0 || site >= count_)
        throw ConfigError("drive site outside the array");
      b[static_cast<std::size_t>(site)] -= omega;
    }
    std::vector<Complex> dinv(n);
    for (std::size_t s = 0; s < n; ++s)
      dinv[s] = 1.0 / (delta + I * damping_[s]);

    const double bnorm = norm2(b);
    FiniteArraySolution sol;
    sol.method = "bicgstab(jacobi)";
    if (bnorm == 0.0) {
      sol.amplitudes.assign(n, Complex{0.0, 0.0});
      sol.residual_norm = 0.0;
      return sol;
    }

    // Unknown y with c = D^{-1} y; operator A D^{-1}.
    std::vector<Complex> y(n, Complex{0.0, 0.0});
    std::vector<Complex> x(n), r(n), rhat(n), p(n), v(n), s(n), t(n), w(n);
    if (warm) {
      if (warm->size() != n)
        throw ConfigError("warm start has the wrong length");
      for (std::size_t k = 0; k < n; ++k)
        y[k] = (*warm)[k] / dinv[k];
    }
    auto op = [&](const std::vector<Complex>& in, std::vector<Complex>& out) {
      for (std::size_t k = 0; k < n; ++k) w[k] = in[k] * dinv[k];
      apply(delta, w, out);
    };

    op(y, r);
    for (std::size_t k = 0; k < n; ++k) r[k] = b[k] - r[k];
    rhat = r;
    Complex rho{1.0, 0.0}, alpha{1.0, 0.0}, omega{1.0, 0.0};
    std::fill(p.begin(), p.end(), Complex{0.0, 0.0});
    std::fill(v.begin(), v.end(), Complex{0.0, 0.0});
    std::vector<double> history;
    history.reserve(256);
    double res = norm2(r) / bnorm;
    history.push_back(res);
    int iters = 0, restarts = 0;

    while (res > tol && iters < max_iter) {
      const Complex rho1 = dot(rhat, r);
      if (std::abs(rho1) < 1e-300 || std::abs(omega) < 1e-300) {
        // Lanczos breakdown: restart from the current residual.
        if (++restarts > 50)
          throw_nonconvergence(history, iters, "breakdown");
        rhat = r;
        rho = alpha = omega = Complex{1.0, 0.0};
        std::fill(p.begin(), p.end(), Complex{0.0, 0.0});
        std::fill(v.begin(), v.end(), Complex{0.0, 0.0});
        continue;
      }
      const Complex beta = (rho1 / rho) * (alpha / omega);
      rho = rho1;
      for (std::size_t k = 0; k < n; ++k)
        p[k] = r[k] + beta * (p[k] - omega * v[k]);
      op(p, v);
      alpha = rho / dot(rhat, v);
      for (std::size_t k = 0; k < n; ++k) s[k] = r[k] - alpha * v[k];
      if (norm2(s) / bnorm < tol) {
        for (std::size_t k = 0; k < n; ++k) y[k] += alpha * p[k];
        r = s;
        ++iters;
        res = norm2(r) / bnorm;
        history.push_back(res);
        break;
      }
      op(s, t);
      omega = dot(t, s) / dot(t, t);
      for (std::size_t k = 0; k < n; ++k) {
        y[k] += alpha * p[k] + omega * s[k];
        r[k] = s[k] - omega * t[k];
      }
      ++iters;
      res = norm2(r) / bnorm;
      history.push_back(res);
    }

    // Certify against the directly recomputed residual.
    for (std::size_t k = 0; k < n; ++k) x[k] = y[k] * dinv[k];
    apply(delta, x, w);
    for (std::size_t k = 0; k < n; ++k) w[k] = b[k] - w[k];
    res = norm2(w) / bnorm;
    if (res > tol) throw_nonconvergence(history, iters, "stalled");
    sol.amplitudes = std::move(x);
    sol.residual_norm = res;
    sol.iterations = iters;
    return sol;
  }

  FiniteArraySolution solve(const FiniteArrayProblem& problem,
                            const std::vector<Complex>* warm = nullptr,
                            double tol = 1e-10, int max_iter = 20000) const {
    problem.validate(consts_);
    if (problem.atom_count() != count_ || problem.geom.d != geom_.d)
      throw ConfigError("problem does not match the prepared solver grid");
    return solve(problem.delta, problem.drive, warm, tol, max_iter);
  }

  // Dense assembly of [delta I - M]; memory guard keeps this an oracle.
  Eigen::MatrixXcd assemble_dense(double delta) const {
    if (count_ > 6000)
      throw ComputeError("dense assembly limited to 6000 atoms");
    const double k0 = consts_.k0();
    const double d = geom_.d;
    Eigen::MatrixXcd a(count_, count_);
    for (int i = -m_; i <= m_; ++i)
      for (int j = -m_; j <= m_; ++j) {
        const int row = flat_index(i, j);
        for (int i2 = -m_; i2 <= m_; ++i2)
          for (int j2 = -m_; j2 <= m_; ++j2) {
            const int col = flat_index(i2, j2);
            if (row == col)
              a(row, col) = delta + I * damping_[static_cast<std::size_t>(row)];
            else
              a(row, col) =
                  green_xx(Vec3{(i - i2) * d, (j - j2) * d, 0.0}, k0);
          }
      }
    return a;
  }

  FiniteArraySolution solve_dense(
      double delta, const std::vector<std::pair<int, Complex>>& drive) const {
    Eigen::MatrixXcd a = assemble_dense(delta);
    Eigen::VectorXcd b = Eigen::VectorXcd::Zero(count_);
    for (const auto& [site, omega] : drive) {
      if (site < 0 || site >= count_)
        throw ConfigError("drive site outside the array");
      b(site) -= omega;
    }
    const Eigen::VectorXcd x = a.partialPivLu().solve(b);
    FiniteArraySolution sol;
    sol.method = "dense(lu)";
    sol.amplitudes.assign(x.data(), x.data() + count_);
    sol.residual_norm = (b - a * x).norm() / std::max(b.norm(), 1e-300);
    sol.iterations = 1;
    return sol;
  }

 private:
  static double norm2(const std::vector<Complex>& v) {
    double acc = 0.0;
    for (const Complex& z : v) acc += std::norm(z);
    return std::sqrt(acc);
  }
  static Complex dot(const std::vector<Complex>& a,
                     const std::vector<Complex>& b) {
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < a.size(); ++k)
      acc += std::conj(a[k]) * b[k];
    return acc;
  }
  [[noreturn]] static void throw_nonconvergence(
      const std::vector<double>& history, int iters, const char* why) {
    std::string msg = "steady-state solver did not converge (";
    msg += why;
    msg += ") after " + std::to_string(iters) + " iterations; residuals:";
    const std::size_t from = history.size() > 6 ? history.size() - 6 : 0;
    char buf[32];
    for (std::size_t k = from; k < history.size(); ++k) {
      std::snprintf(buf, sizeof buf, " %.3e", history[k]);
      msg += buf;
    }
    throw ComputeError(msg);
  }

  LatticeGeometry geom_;
  PhysicalConstants consts_;
  double half_size_l_ = 0.0, r_cutoff_ = 0.0;
  int m_ = 0, side_ = 0, count_ = 0;
  std::unique_ptr<ToeplitzConvolver2D> conv_;
  std::vector<double> damping_;
};

inline FiniteArraySolution solve_steady_state(const FiniteArrayProblem& p,
                                              const PhysicalConstants& consts,
                                              double tol = 1e-10,
                                              int max_iter = 20000) {
  return FiniteArraySolver::for_problem(p, consts).solve(p, nullptr, tol,
                                                         max_iter);
}

// Response amplitudes of the center-driven array at the driven site and its
// two nearest neighbors (along and across the polarization axis).
struct ChiSample {
  Complex chi0, chi_dx, chi_dy;
};

inline ChiSample susceptibility_sample(const FiniteArraySolver& solver,
                                       double delta,
                                       const std::vector<Complex>* warm =
                                           nullptr,
                                       double tol = 1e-10,
                                       std::vector<Complex>* amplitudes_out =
                                           nullptr) {
  if (solver.half_span() < 1)
    throw ComputeError("array too small to read neighbor susceptibilities");
  const std::vector<std::pair<int, Complex>> drive = {
      {solver.center_index(), Complex{1.0, 0.0}}};
  FiniteArraySolution sol = solver.solve(delta, drive, warm, tol);
  ChiSample chi;
  chi.chi0 = sol.amplitudes[static_cast<std::size_t>(solver.flat_index(0, 0))];
  chi.chi_dx =
      sol.amplitudes[static_cast<std::size_t>(solver.flat_index(1, 0))];
  chi.chi_dy =
      sol.amplitudes[static_cast<std::size_t>(solver.flat_index(0, 1))];
  if (amplitudes_out) *amplitudes_out = std::move(sol.amplitudes);
  return chi;
}

// chi(offset, delta) = c_{center+offset} / Omega_center for a single
// center-driven array sized by the canonical cutoff rules.
inline Complex susceptibility(double delta, int offset_i, int offset_j,
                              const LatticeGeometry& geom,
                              const PhysicalConstants& consts,
                              double r_cutoff = 0.0, double tol = 1e-10) {
  const FiniteArrayProblem p =
      FiniteArrayProblem::center_driven(geom, consts, delta, r_cutoff);
  const FiniteArraySolver solver(geom, consts, p.half_size_l, p.r_cutoff);
  const FiniteArraySolution sol = solver.solve(p, nullptr, tol);
  return sol.amplitudes[static_cast<std::size_t>(
      solver.flat_index(offset_i, offset_j))];
}

// chi(0, delta), chi(d x, delta), chi(d y, delta) sampled on a detuning grid
// with cubic interpolation between nodes; one linear solve per node, warm
// started along the sweep.
class SusceptibilityTable {
 public:
  SusceptibilityTable(const LatticeGeometry& geom,
                      const PhysicalConstants& consts,
                      std::vector<double> delta_grid, double r_cutoff = 0.0,
                      double tol = 1e-10)
      : geom_(geom), deltas_(std::move(delta_grid)) {
    if (deltas_.size() < 2)
      throw ConfigError("susceptibility table needs >= 2 detunings");
    for (std::size_t k = 0; k + 1 < deltas_.size(); ++k)
      if (!(deltas_[k] < deltas_[k + 1]))
        throw ConfigError("susceptibility detunings must increase");
    const FiniteArrayProblem shape =
        FiniteArrayProblem::center_driven(geom, consts, deltas_[0], r_cutoff);
    FiniteArraySolver solver(geom, consts, shape.half_size_l, shape.r_cutoff);
    r_cutoff_ = solver.achieved_r_cutoff();
    atom_count_ = solver.atom_count();
    chi0_.reserve(deltas_.size());
    chi_dx_.reserve(deltas_.size());
    chi_dy_.reserve(deltas_.size());
    std::vector<Complex> warm;
    for (std::size_t k = 0; k < deltas_.size(); ++k) {
      const ChiSample s = susceptibility_sample(
          solver, deltas_[k], warm.empty() ? nullptr : &warm, tol, &warm);
      chi0_.push_back(s.chi0);
      chi_dx_.push_back(s.chi_dx);
      chi_dy_.push_back(s.chi_dy);
    }
    interp0_ = CubicHermite<Complex>(deltas_, chi0_);
    interp_dx_ = CubicHermite<Complex>(deltas_, chi_dx_);
    interp_dy_ = CubicHermite<Complex>(deltas_, chi_dy_);
  }

  Complex chi0(double delta) const { return interp0_(delta); }
  Complex chi_dx(double delta) const { return interp_dx_(delta); }
  Complex chi_dy(double delta) const { return interp_dy_(delta); }

  const std::vector<double>& deltas() const { return deltas_; }
  const std::vector<Complex>& chi0_nodes() const { return chi0_; }
  const std::vector<Complex>& chi_dx_nodes() const { return chi_dx_; }
  const std::vector<Complex>& chi_dy_nodes() const { return chi_dy_; }
  double achieved_r_cutoff() const { return r_cutoff_; }
  int atom_count() const { return atom_count_; }
  const LatticeGeometry& geom() const { return geom_; }

 private:
  LatticeGeometry geom_;
  std::vector<double> deltas_;
  std::vector<Complex> chi0_, chi_dx_, chi_dy_;
  CubicHermite<Complex> interp0_, interp_dx_, interp_dy_;
  double r_cutoff_ = 0.0;
  int atom_count_ = 0;
};

// Rate at which the driven defect radiates into the array.
inline double gamma_d_from_chi(Complex chi0) {
  if (std::abs(chi0) < 1e-300)
    throw ComputeError("vanishing susceptibility in gamma_d");
  return -2.0 * std::imag(1.0 / chi0);
}

inline double gamma_d(double delta, const LatticeGeometry& geom,
                      const PhysicalConstants& consts, double r_cutoff = 0.0,
                      double tol = 1e-10) {
  return gamma_d_from_chi(
      susceptibility(delta, 0, 0, geom, consts, r_cutoff, tol));
}

// Effective number of atoms silenced by one hole: the resonant defect
// emission rate against the collective linewidth.
inline double effective_hole_size(const Lattice2D& lattice,
                                  double r_cutoff = 0.0, double tol = 1e-10) {
  const double gd = gamma_d(lattice.omega0(), lattice.geometry(),
                            lattice.constants(), r_cutoff, tol);
  return gd / lattice.gamma0_collective();
}

inline Complex hole_self_energy(Complex chi0) {
  if (std::abs(chi0) < 1e-300)
    throw ComputeError("vanishing susceptibility in hole self-energy");
  return 1.0 / chi0;
}

enum class DefectKind { hole, holon_doublon };

// Transmission and reflection of a layer with a dilute density p of defects;
// reduces to the perfect layer at p = 0.
inline Lattice2D::LayerResponse defected_layer_t_r(const Lattice2D& lattice,
                                                   double delta, double p,
                                                   Complex sigma_defect) {
  if (!(p >= 0.0) || p > 1.0)
    throw ConfigError("defect probability must lie in [0, 1]");
  return lattice.layer_response(delta, p * sigma_defect);
}

inline Lattice2D::LayerResponse defected_layer_t_r(
    const Lattice2D& lattice, const SusceptibilityTable& table, double delta,
    double p, DefectKind kind, HdCombine combine = HdCombine::sum) {
  Complex sigma;
  if (kind == DefectKind::hole) {
    sigma = hole_self_energy(table.chi0(delta));
  } else {
    sigma = sigma_hole_doublon(table.chi0(delta), table.chi_dx(delta),
                               table.chi_dy(delta), combine);
  }
  return defected_layer_t_r(lattice, delta, p, sigma);
}

}  // namespace atomlight
