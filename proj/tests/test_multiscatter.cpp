#include <catch2/catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <random>
#include <vector>

#include "atomlight/lattice2d.hpp"
#include "atomlight/multiscatter.hpp"

using namespace atomlight;
using Catch::Approx;

namespace {

PhysicalConstants consts() { return PhysicalConstants{}; }

Lattice2D make_lattice(double d_over_lambda0) {
  PhysicalConstants c;
  auto geom = LatticeGeometry::from_lambda0(d_over_lambda0, 2.5, c);
  return Lattice2D(geom, c);
}

// Solver on the canonical box: absorber onset lambda0/2, edge at 0.75 lambda0.
FiniteArraySolver half_lambda_solver(double d_over_lambda0) {
  PhysicalConstants c;
  auto geom = LatticeGeometry::from_lambda0(d_over_lambda0, 2.5, c);
  return FiniteArraySolver(geom, c, 0.75 * c.lambda0, 0.5 * c.lambda0);
}

double rel_diff(Complex a, Complex b) {
  return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

}  // namespace

TEST_CASE("absorbing profile is zero inside the onset and quadratic outside") {
  const double rc = 0.37, gc = 11.5;
  REQUIRE(absorbing_profile(0.0, rc, gc) == 0.0);
  REQUIRE(absorbing_profile(0.3 * rc, rc, gc) == 0.0);
  REQUIRE(absorbing_profile(rc, rc, gc) == 0.0);
  REQUIRE(absorbing_profile(1.5 * rc, rc, gc) == Approx(3.0 * gc).epsilon(1e-14));
  REQUIRE(absorbing_profile(1.25 * rc, rc, gc) ==
          Approx(0.75 * gc).epsilon(1e-14));
  // quadratic growth: doubling the overhang quadruples the rate
  const double a = absorbing_profile(1.1 * rc, rc, gc);
  const double b = absorbing_profile(1.2 * rc, rc, gc);
  REQUIRE(b / a == Approx(4.0).epsilon(1e-12));
}

TEST_CASE("recommended box policy keeps the absorber onset at lambda0/2 and "
          "grows coarse-lattice boxes") {
  PhysicalConstants c;
  const double l0 = c.lambda0;

  // small d: onset-driven span, rc exactly lambda0/2 when 0.75 lambda0/d is
  // an integer
  REQUIRE(recommended_half_span(l0 / 200, l0) == 150);
  REQUIRE(recommended_r_cutoff(l0 / 200, l0) == Approx(0.5 * l0).epsilon(1e-12));

  // coarse d: the 100-shell floor wins, box is much larger than lambda0/2
  REQUIRE(recommended_half_span(l0 / 60, l0) == 100);
  REQUIRE(recommended_r_cutoff(l0 / 60, l0) ==
          Approx((200.0 / 3.0) * (l0 / 60)).epsilon(1e-12));
  REQUIRE(recommended_r_cutoff(l0 / 60, l0) > 0.5 * l0);

  // very small d: the site budget caps the span below the onset rule
  REQUIRE(recommended_half_span(l0 / 400, l0) == 157);
  const int side = 2 * 157 + 1;
  REQUIRE(static_cast<long>(side) * side <= 100000);
  REQUIRE(recommended_r_cutoff(l0 / 400, l0) < 0.5 * l0);

  // tighter budget lowers the cap
  REQUIRE(recommended_half_span(l0 / 200, l0, 40401) == 100);

  // uncapped spans always reach the lambda0/2 onset
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> ud(1.0 / 300, 1.0 / 3);
  for (int k = 0; k < 200; ++k) {
    const double d = ud(rng) * l0;
    const int m = recommended_half_span(d, l0);
    if (m < 157)
      REQUIRE(recommended_r_cutoff(d, l0) >= 0.5 * l0 * (1.0 - 1e-12));
  }

  REQUIRE_THROWS_AS(recommended_half_span(0.0, l0), ConfigError);
  REQUIRE_THROWS_AS(recommended_half_span(l0 / 100, l0, 8), ConfigError);
}

TEST_CASE("finite array problem geometry and validation") {
  PhysicalConstants c;
  auto geom = LatticeGeometry::from_lambda0(0.2, 2.5, c);
  auto p = FiniteArrayProblem::center_driven(geom, c, 0.5);

  REQUIRE(p.r_cutoff == Approx(0.5 * c.lambda0));
  REQUIRE(p.half_size_l == Approx(0.75 * c.lambda0));
  REQUIRE(p.half_span() == 3);
  REQUIRE(p.side() == 7);
  REQUIRE(p.atom_count() == 49);
  REQUIRE(p.flat_index(0, 0) == 24);
  REQUIRE(p.flat_index(-3, -3) == 0);
  REQUIRE(p.flat_index(3, 3) == 48);
  REQUIRE_THROWS_AS(p.flat_index(4, 0), ConfigError);
  REQUIRE_THROWS_AS(p.flat_index(0, -4), ConfigError);
  REQUIRE(p.drive.size() == 1);
  REQUIRE(p.drive[0].first == 24);

  // edge must sit at 1.5x the absorber onset
  auto bad = p;
  bad.half_size_l = 2.0 * bad.r_cutoff;
  REQUIRE_THROWS_AS(bad.validate(c), ConfigError);

  // onset below lambda0/2 rejected
  bad = p;
  bad.r_cutoff = 0.4 * c.lambda0;
  bad.half_size_l = 1.5 * bad.r_cutoff;
  REQUIRE_THROWS_AS(bad.validate(c), ConfigError);

  bad = p;
  bad.half_size_l = 0.0;
  REQUIRE_THROWS_AS(bad.validate(c), ConfigError);

  bad = p;
  bad.delta = std::numeric_limits<double>::quiet_NaN();
  REQUIRE_THROWS_AS(bad.validate(c), ConfigError);
}

TEST_CASE("single isolated atom reproduces the vacuum Lorentzian") {
  PhysicalConstants c;
  auto geom = LatticeGeometry::from_lambda0(0.8, 2.5, c);
  for (double delta : {0.0, 1.7, -3.2}) {
    auto p = FiniteArrayProblem::center_driven(geom, c, delta);
    REQUIRE(p.atom_count() == 1);
    auto sol = solve_steady_state(p, c);
    const Complex expect = 1.0 / (-delta - 0.5 * I);
    REQUIRE(rel_diff(sol.amplitudes[0], expect) < 1e-12);
  }
  // resonant amplitude is twice the drive
  auto p = FiniteArrayProblem::center_driven(geom, c, 0.0);
  auto sol = solve_steady_state(p, c);
  REQUIRE(std::abs(sol.amplitudes[0]) == Approx(2.0).epsilon(1e-12));
}

TEST_CASE("steady state is linear in the drive amplitude") {
  auto s = half_lambda_solver(0.2);
  const Complex alpha{2.5, -1.3};
  auto a = s.solve(1.3, {{s.center_index(), Complex{1.0, 0.0}}});
  auto b = s.solve(1.3, {{s.center_index(), alpha}});
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < a.amplitudes.size(); ++k) {
    worst = std::max(worst, std::abs(b.amplitudes[k] - alpha * a.amplitudes[k]));
    scale = std::max(scale, std::abs(a.amplitudes[k]));
  }
  REQUIRE(worst < 1e-8 * scale);
}

TEST_CASE("uniformly driven array approaches the infinite-lattice amplitude "
          "red of the collective resonance") {
  PhysicalConstants c;
  auto lat = make_lattice(0.2);
  // large box, absorber pushed beyond the edge so all sites are undamped
  FiniteArraySolver s(lat.geometry(), c, 6.0 * c.lambda0, 100.0 * c.lambda0);
  REQUIRE(s.atom_count() == 3721);
  std::vector<std::pair<int, Complex>> drive;
  drive.reserve(s.atom_count());
  for (int k = 0; k < s.atom_count(); ++k)
    drive.push_back({k, Complex{1.0, 0.0}});
  const double w0 = lat.omega0();
  const double g = lat.gamma0_collective();
  for (double off : {5.0, 8.0}) {
    const double delta = w0 + off;
    auto sol = s.solve(delta, drive);
    const Complex expect = 1.0 / (-delta + w0 - 0.5 * I * g);
    const Complex center = sol.amplitudes[s.center_index()];
    REQUIRE(rel_diff(center, expect) < 0.05);
  }
}

TEST_CASE("FFT matvec agrees with the direct pairwise sum") {
  PhysicalConstants c;
  auto geom = LatticeGeometry::from_lambda0(1.0 / 60, 2.5, c);
  FiniteArraySolver s(geom, c, 0.75 * c.lambda0, 0.5 * c.lambda0);
  const int m = s.half_span();
  const int side = s.side();
  const int n = s.atom_count();
  REQUIRE(n == 8281);

  std::mt19937 rng(42);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  std::vector<Complex> x(n);
  for (auto& v : x) v = Complex{ud(rng), ud(rng)};

  const double delta = 0.37;
  std::vector<Complex> y_fft;
  s.apply(delta, x, y_fft);

  const double d = geom.d;
  const double k0 = c.k0();
  const double gc = 3.0 * c.lambda0 * c.lambda0 / (4.0 * pi * d * d);
  std::vector<Complex> y_ref(n);
  double ms = 0.0, mr = 0.0;
  for (int i = -m; i <= m; ++i)
    for (int j = -m; j <= m; ++j) {
      const int row = (i + m) * side + (j + m);
      Complex acc{0.0, 0.0};
      for (int i2 = -m; i2 <= m; ++i2)
        for (int j2 = -m; j2 <= m; ++j2) {
          if (i2 == i && j2 == j) continue;
          const int col = (i2 + m) * side + (j2 + m);
          acc += green_xx(Vec3{(i - i2) * d, (j - j2) * d, 0.0}, k0) * x[col];
        }
      const double r = d * std::sqrt(double(i) * i + double(j) * j);
      const double damp = 0.5 * (1.0 + absorbing_profile(r, 0.5 * c.lambda0, gc));
      y_ref[row] = acc + (delta + I * damp) * x[row];
      ms = std::max(ms, std::abs(y_ref[row] - y_fft[row]));
      mr = std::max(mr, std::abs(y_ref[row]));
    }
  REQUIRE(ms < 1e-12 * mr);
}

TEST_CASE("FFT matvec agrees with the dense assembled operator") {
  auto s = half_lambda_solver(0.2);
  const int n = s.atom_count();
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> ud(-1.0, 1.0);
  std::vector<Complex> x(n);
  for (auto& v : x) v = Complex{ud(rng), ud(rng)};
  const double delta = -2.1;
  std::vector<Complex> y;
  s.apply(delta, x, y);
  Eigen::MatrixXcd a = s.assemble_dense(delta);
  Eigen::Map<const Eigen::VectorXcd> xv(x.data(), n);
  Eigen::VectorXcd yd = a * xv;
  double worst = 0.0;
  for (int k = 0; k < n; ++k)
    worst = std::max(worst, std::abs(yd(k) - y[static_cast<std::size_t>(k)]));
  REQUIRE(worst < 1e-13 * yd.norm());
}

TEST_CASE("iterative solver matches the dense LU oracle on random problems") {
  PhysicalConstants c;
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ud_d(0.08, 0.4);
  std::uniform_real_distribution<double> ud_off(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double dl = ud_d(rng);
    auto lat = make_lattice(dl);
    FiniteArraySolver s(lat.geometry(), c, 0.75 * c.lambda0, 0.5 * c.lambda0);
    const double delta = lat.omega0() + ud_off(rng) * lat.gamma0_collective();
    const std::vector<std::pair<int, Complex>> drive = {
        {s.center_index(), Complex{1.0, 0.0}}};
    auto it = s.solve(delta, drive, nullptr, 1e-11);
    auto de = s.solve_dense(delta, drive);
    REQUIRE(it.method == "bicgstab(jacobi)");
    REQUIRE(de.method == "dense(lu)");
    double worst = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < it.amplitudes.size(); ++k) {
      worst = std::max(worst, std::abs(it.amplitudes[k] - de.amplitudes[k]));
      scale = std::max(scale, std::abs(de.amplitudes[k]));
    }
    REQUIRE(worst < 1e-9 * scale);
    REQUIRE(it.residual_norm <= 1e-11);
  }
  // one medium-size cross-check
  auto s = half_lambda_solver(0.05);
  REQUIRE(s.atom_count() == 961);
  auto lat = make_lattice(0.05);
  const std::vector<std::pair<int, Complex>> drive = {
      {s.center_index(), Complex{1.0, 0.0}}};
  auto it = s.solve(lat.omega0(), drive);
  auto de = s.solve_dense(lat.omega0(), drive);
  double worst = 0.0, scale = 0.0;
  for (std::size_t k = 0; k < it.amplitudes.size(); ++k) {
    worst = std::max(worst, std::abs(it.amplitudes[k] - de.amplitudes[k]));
    scale = std::max(scale, std::abs(de.amplitudes[k]));
  }
  REQUIRE(worst < 1e-9 * scale);
}

TEST_CASE("coupling matrix is passive: collective decay rates are "
          "non-negative") {
  PhysicalConstants c;
  auto geom = LatticeGeometry::from_lambda0(0.12, 2.5, c);
  // no absorber: pure radiative physics
  FiniteArraySolver s(geom, c, 0.75 * c.lambda0, 100.0 * c.lambda0);
  REQUIRE(s.atom_count() == 169);
  Eigen::MatrixXcd a = s.assemble_dense(0.0);
  Eigen::MatrixXcd h = (a - a.adjoint()) / (2.0 * I);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  REQUIRE(hi > 0.0);
  REQUIRE(lo > -1e-10 * hi);

  // the absorber only adds damping, so passivity is preserved
  FiniteArraySolver sa(geom, c, 0.75 * c.lambda0, 0.5 * c.lambda0);
  Eigen::MatrixXcd aa = sa.assemble_dense(0.0);
  Eigen::MatrixXcd ha = (aa - aa.adjoint()) / (2.0 * I);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eiga(ha);
  REQUIRE(eiga.eigenvalues().minCoeff() > -1e-10 * eiga.eigenvalues().maxCoeff());
}

TEST_CASE("resonant defect susceptibility approaches the cubic asymptote",
          "[heavy]") {
  const double dl = 0.01;
  auto lat = make_lattice(dl);
  auto s = half_lambda_solver(dl);
  auto sample = susceptibility_sample(s, lat.omega0());
  const double d3 = dl * dl * dl;
  REQUIRE(sample.chi0.imag() / d3 > 187.0 * 0.8);
  REQUIRE(sample.chi0.imag() / d3 < 187.0 * 1.2);
  REQUIRE(sample.chi0.real() / d3 > 24.0 * 0.7);
  REQUIRE(sample.chi0.real() / d3 < 24.0 * 1.3);
  const double nh = gamma_d_from_chi(sample.chi0) / lat.gamma0_collective();
  REQUIRE(nh > 1.0);
}

TEST_CASE("resonant susceptibility is insensitive to the absorber placement",
          "[heavy]") {
  PhysicalConstants c;
  auto lat = make_lattice(1.0 / 60);
  const double d = lat.geometry().d;
  const int m = recommended_half_span(d, c.lambda0);
  Complex base{}, wide{};
  for (int scale_num : {2, 3}) {
    const int mm = m * scale_num / 2;  // 1.0x and 1.5x
    FiniteArraySolver s(lat.geometry(), c, (mm + 0.499) * d,
                        (2.0 / 3.0) * mm * d);
    auto sample = susceptibility_sample(s, lat.omega0());
    (scale_num == 2 ? base : wide) = sample.chi0;
  }
  REQUIRE(std::abs(wide - base) / std::abs(base) < 0.05);
}

TEST_CASE("susceptibility table reproduces fresh solves at and between nodes") {
  PhysicalConstants c;
  auto lat = make_lattice(0.05);
  const double w0 = lat.omega0();
  const double g = lat.gamma0_collective();
  const int n_nodes = 15;
  std::vector<double> grid(n_nodes);
  for (int k = 0; k < n_nodes; ++k)
    grid[k] = w0 + (0.3 + 0.7 * k / (n_nodes - 1.0)) * g;
  SusceptibilityTable table(lat.geometry(), c, grid);
  REQUIRE(table.atom_count() == 961);
  REQUIRE(table.achieved_r_cutoff() == Approx(0.5 * c.lambda0));

  FiniteArraySolver s(lat.geometry(), c, 0.75 * c.lambda0, 0.5 * c.lambda0);
  // node exactness against independent cold solves
  for (int k : {0, n_nodes / 2, n_nodes - 1}) {
    auto fresh = susceptibility_sample(s, grid[static_cast<std::size_t>(k)]);
    REQUIRE(rel_diff(table.chi0_nodes()[static_cast<std::size_t>(k)],
                     fresh.chi0) < 1e-8);
    REQUIRE(rel_diff(table.chi0(grid[static_cast<std::size_t>(k)]),
                     fresh.chi0) < 1e-8);
  }
  // interpolation between nodes, on the smooth side of the band edge
  for (double frac : {0.5, 0.5 + 1.0 / 14}) {
    const double delta = w0 + (0.3 + 0.7 * frac) * g;
    auto fresh = susceptibility_sample(s, delta);
    REQUIRE(rel_diff(table.chi0(delta), fresh.chi0) < 0.02);
    REQUIRE(rel_diff(table.chi_dx(delta), fresh.chi_dx) < 0.02);
    REQUIRE(rel_diff(table.chi_dy(delta), fresh.chi_dy) < 0.05);
  }

  REQUIRE_THROWS_AS(table.chi0(w0), ComputeError);       // below the grid
  REQUIRE_THROWS_AS(table.chi0(w0 + 3.0 * g), ComputeError);  // above
  REQUIRE_THROWS_AS(SusceptibilityTable(lat.geometry(), c, {w0}), ConfigError);
  REQUIRE_THROWS_AS(SusceptibilityTable(lat.geometry(), c, {w0, w0}),
                    ConfigError);
}

TEST_CASE("defect emission rate into the array is positive on resonance") {
  PhysicalConstants c;
  for (double dl : {0.3, 0.1}) {
    auto lat = make_lattice(dl);
    const double gd = gamma_d(lat.omega0(), lat.geometry(), c);
    REQUIRE(gd > 0.0);
    if (dl == 0.3) REQUIRE((gd > 0.5 && gd < 5.0));
    if (dl == 0.1) REQUIRE((gd > 10.0 && gd < 100.0));
  }
  auto lat = make_lattice(0.1);
  const double nh = effective_hole_size(lat);
  REQUIRE((nh > 0.5 && nh < 5.0));
  REQUIRE_THROWS_AS(gamma_d_from_chi(Complex{0.0, 0.0}), ComputeError);
  REQUIRE_THROWS_AS(hole_self_energy(Complex{0.0, 0.0}), ComputeError);
}

TEST_CASE("hole self-energy is dissipative where the defect radiates") {
  PhysicalConstants c;
  auto lat = make_lattice(0.1);
  auto s = half_lambda_solver(0.1);
  auto sample = susceptibility_sample(s, lat.omega0());
  REQUIRE(sample.chi0.imag() > 0.0);
  REQUIRE(hole_self_energy(sample.chi0).imag() < 0.0);
}

TEST_CASE("holon-doublon pair cross sections straddle the single-defect one") {
  PhysicalConstants c;
  auto lat = make_lattice(0.05);
  auto s = half_lambda_solver(0.05);
  auto sample = susceptibility_sample(s, lat.omega0());
  const double s1 = -std::imag(1.0 / sample.chi0);
  const double sx = -std::imag(1.0 / (sample.chi0 + sample.chi_dx));
  const double sy = -std::imag(1.0 / (sample.chi0 + sample.chi_dy));
  REQUIRE(s1 > 0.0);
  // pair aligned with the polarization scatters like one defect; the
  // transverse pair like two
  REQUIRE(2.0 * sx / s1 > 1.0 / 1.5);
  REQUIRE(2.0 * sx / s1 < 1.5);
  REQUIRE(sy / s1 > 1.0 / 1.5);
  REQUIRE(sy / s1 < 1.5);
}

TEST_CASE("defected layer reduces to the perfect layer at zero density and "
          "loses energy linearly in the defect density") {
  PhysicalConstants c;
  auto lat = make_lattice(0.05);
  const double w0 = lat.omega0();
  auto s = half_lambda_solver(0.05);
  auto sample = susceptibility_sample(s, w0);
  const Complex sigma_h = hole_self_energy(sample.chi0);

  auto base = lat.layer_response(w0);
  auto zero = defected_layer_t_r(lat, w0, 0.0, sigma_h);
  REQUIRE(zero.r == base.r);
  REQUIRE(zero.t == base.t);

  double first_ratio = 0.0;
  double prev_loss = 0.0;
  for (double p : {1e-3, 2e-3, 5e-3, 1e-2}) {
    auto resp = defected_layer_t_r(lat, w0, p, sigma_h);
    const double loss =
        1.0 - std::norm(resp.r) - std::norm(resp.t);
    REQUIRE(loss > 0.0);
    REQUIRE(loss > prev_loss);
    prev_loss = loss;
    const double ratio = loss / p;
    REQUIRE((ratio > 2.0 && ratio < 3.5));
    if (first_ratio == 0.0) first_ratio = ratio;
    REQUIRE(std::abs(ratio - first_ratio) < 0.05 * first_ratio);
  }

  REQUIRE_THROWS_AS(defected_layer_t_r(lat, w0, -0.1, sigma_h), ConfigError);
  REQUIRE_THROWS_AS(defected_layer_t_r(lat, w0, 1.1, sigma_h), ConfigError);
}

TEST_CASE("table-driven defected layer matches the explicit self-energy path") {
  PhysicalConstants c;
  auto lat = make_lattice(0.05);
  const double w0 = lat.omega0();
  const double g = lat.gamma0_collective();
  std::vector<double> grid;
  for (int k = 0; k <= 8; ++k) grid.push_back(w0 + (0.3 + 0.0875 * k) * g);
  SusceptibilityTable table(lat.geometry(), c, grid);
  const double delta = w0 + 0.65 * g;

  auto via_table =
      defected_layer_t_r(lat, table, delta, 2e-3, DefectKind::hole);
  auto direct = defected_layer_t_r(lat, delta, 2e-3,
                                   hole_self_energy(table.chi0(delta)));
  REQUIRE(via_table.r == direct.r);
  REQUIRE(via_table.t == direct.t);

  auto hd = defected_layer_t_r(lat, table, delta, 2e-3,
                               DefectKind::holon_doublon);
  auto hd_direct = defected_layer_t_r(
      lat, delta, 2e-3,
      sigma_hole_doublon(table.chi0(delta), table.chi_dx(delta),
                         table.chi_dy(delta)));
  REQUIRE(hd.r == hd_direct.r);
  REQUIRE(1.0 - std::norm(hd.r) - std::norm(hd.t) > 0.0);

  auto hd_mean = defected_layer_t_r(lat, table, delta, 2e-3,
                                    DefectKind::holon_doublon,
                                    HdCombine::mean);
  REQUIRE(hd_mean.r != hd.r);
}

TEST_CASE("solver guards reject malformed inputs") {
  PhysicalConstants c;
  auto s = half_lambda_solver(0.2);
  const std::vector<std::pair<int, Complex>> ok = {
      {s.center_index(), Complex{1.0, 0.0}}};

  REQUIRE_THROWS_AS(s.solve(0.0, {}), ConfigError);
  REQUIRE_THROWS_AS(s.solve(0.0, {{-1, Complex{1.0, 0.0}}}), ConfigError);
  REQUIRE_THROWS_AS(s.solve(0.0, {{s.atom_count(), Complex{1.0, 0.0}}}),
                    ConfigError);
  REQUIRE_THROWS_AS(
      s.solve(std::numeric_limits<double>::quiet_NaN(), ok), ConfigError);
  std::vector<Complex> short_warm(3);
  REQUIRE_THROWS_AS(s.solve(0.0, ok, &short_warm), ConfigError);

  // nonconvergence surfaces as a compute error
  auto hard = half_lambda_solver(0.1);
  REQUIRE_THROWS_AS(
      hard.solve(make_lattice(0.1).omega0(),
                 {{hard.center_index(), Complex{1.0, 0.0}}}, nullptr, 1e-10,
                 1),
      ComputeError);

  // dense assembly is memory-guarded
  auto big = half_lambda_solver(1.0 / 60);
  REQUIRE_THROWS_AS(big.assemble_dense(0.0), ComputeError);

  // neighbor read-out needs at least a 3x3 array
  PhysicalConstants cc;
  auto tiny_geom = LatticeGeometry::from_lambda0(0.8, 2.5, cc);
  FiniteArraySolver tiny(tiny_geom, cc, 0.75 * cc.lambda0, 0.5 * cc.lambda0);
  REQUIRE_THROWS_AS(susceptibility_sample(tiny, 0.0), ComputeError);

  // problem/solver mismatch
  auto other = FiniteArrayProblem::center_driven(
      LatticeGeometry::from_lambda0(0.3, 2.5, cc), cc, 0.0);
  REQUIRE_THROWS_AS(s.solve(other), ConfigError);
}

TEST_CASE("repeated solves are bitwise deterministic") {
  PhysicalConstants c;
  auto lat = make_lattice(0.2);
  auto p = FiniteArrayProblem::center_driven(lat.geometry(), c, lat.omega0());

  auto a = solve_steady_state(p, c);
  auto b = solve_steady_state(p, c);
  REQUIRE(a.amplitudes.size() == b.amplitudes.size());
  REQUIRE(std::memcmp(a.amplitudes.data(), b.amplitudes.data(),
                      a.amplitudes.size() * sizeof(Complex)) == 0);

  // same solver object reused
  auto s = FiniteArraySolver::for_problem(p, c);
  auto x = s.solve(p);
  auto y = s.solve(p);
  REQUIRE(std::memcmp(x.amplitudes.data(), y.amplitudes.data(),
                      x.amplitudes.size() * sizeof(Complex)) == 0);
  REQUIRE(std::memcmp(a.amplitudes.data(), x.amplitudes.data(),
                      a.amplitudes.size() * sizeof(Complex)) == 0);

  // one-shot helper agrees with the explicit path
  const Complex chi =
      susceptibility(lat.omega0(), 0, 0, lat.geometry(), c);
  REQUIRE(chi == a.amplitudes[static_cast<std::size_t>(
                     s.flat_index(0, 0))]);
}
