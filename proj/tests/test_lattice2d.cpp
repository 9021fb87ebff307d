#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <random>
#include <vector>

#include "atomlight/lattice2d.hpp"

using namespace atomlight;
using Catch::Approx;

namespace {

Lattice2D make_lattice(double d_over_lambda0) {
  PhysicalConstants consts;
  auto geom = LatticeGeometry::from_lambda0(d_over_lambda0, 2.5, consts);
  return Lattice2D(geom, consts);
}

// Square-lattice quasi-static dipole sum sum'_{R}(3 u - 1)/|R/d|^3 evaluated
// directly with a circular cutoff plus the analytic 2 pi / R_c tail of its
// angular average; independent oracle for the small-d limit of omega(0).
double static_dipole_sum_oracle() {
  const int n = 2000;
  const double rc2 = static_cast<double>(n) * n;
  double sum = 0.0;
  for (int i = -n; i <= n; ++i) {
    for (int j = -n; j <= n; ++j) {
      if (i == 0 && j == 0) continue;
      const double rho2 = static_cast<double>(i) * i + static_cast<double>(j) * j;
      if (rho2 > rc2) continue;
      const double rho = std::sqrt(rho2);
      sum += (3.0 * i * i / rho2 - 1.0) / (rho2 * rho);
    }
  }
  return sum + 0.5 * 2.0 * pi / n;  // angular-average tail of (3u-1) is 1/2
}

}  // namespace

TEST_CASE("collective linewidth at k = 0 matches the closed form") {
  auto lat = make_lattice(0.1);
  REQUIRE(lat.gamma0_collective() == Approx(23.873241463784304).epsilon(1e-12));
  REQUIRE(lat.gamma_k(0, 0) == Approx(lat.gamma0_collective()).epsilon(1e-14));

  auto lat5 = make_lattice(0.2);
  const double lam = lat5.constants().lambda0;
  const double d = lat5.geometry().d;
  REQUIRE(lat5.gamma0_collective() ==
          Approx(3.0 * lam * lam / (4 * pi * d * d)).epsilon(1e-14));
}

TEST_CASE("linewidth formula across the light cone") {
  auto lat = make_lattice(0.2);
  const double k0 = lat.constants().k0();

  // inside: exact analytic value
  const double kx = 0.5 * k0, ky = 0.3 * k0;
  const double expected = lat.gamma0_collective() * (k0 * k0 - kx * kx) /
                          (k0 * std::sqrt(k0 * k0 - kx * kx - ky * ky));
  REQUIRE(lat.gamma_k(kx, ky) == Approx(expected).epsilon(1e-14));

  // on the cone: +inf sentinel
  REQUIRE(std::isinf(lat.gamma_k(k0, 0)));
  REQUIRE(std::isinf(lat.gamma_k(k0 / std::sqrt(2.0), k0 / std::sqrt(2.0))));

  // outside: perfectly dark
  REQUIRE(lat.gamma_k(1.5 * k0, 0) == 0.0);
  REQUIRE(lat.gamma_k(1.1 * k0, 1.1 * k0) == 0.0);

  // never negative
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(-pi / lat.geometry().d,
                                           pi / lat.geometry().d);
  for (int i = 0; i < 1000; ++i) {
    const double g = lat.gamma_k(u(rng), u(rng));
    REQUIRE(g >= 0.0);
  }
}

TEST_CASE("mode sum reproduces the analytic linewidth (two independent routes)") {
  for (double dol : {0.2, 0.1}) {
    auto lat = make_lattice(dol);
    const auto ms = lat.mode_sum(0, 0, 1e-6);
    REQUIRE(ms.gamma_from_sum ==
            Approx(lat.gamma0_collective()).epsilon(1e-4));
  }
  // off-center Bloch vector inside the light cone
  auto lat = make_lattice(0.2);
  const double k0 = lat.constants().k0();
  const auto ms = lat.mode_sum(0.3 * k0, 0.2 * k0, 1e-6);
  REQUIRE(ms.gamma_from_sum == Approx(lat.gamma_k(0.3 * k0, 0.2 * k0)).epsilon(1e-3));
}

TEST_CASE("dispersion is even in k and spans hundreds of linewidths at d = lambda0/20") {
  auto lat = make_lattice(0.05);
  const double k0 = lat.constants().k0();
  for (auto [kx, ky] : std::vector<std::pair<double, double>>{
           {0.4 * k0, 0.1 * k0}, {3.0 * k0, 5.0 * k0}, {0.9 * k0, -2.0 * k0}}) {
    const double wp = lat.omega_k(kx, ky);
    const double wm = lat.omega_k(-kx, -ky);
    REQUIRE(wp == Approx(wm).epsilon(1e-10).margin(1e-10));
  }

  const double bz = pi / lat.geometry().d;
  const double w_center = lat.omega0();
  const double w_edge = lat.omega_k(bz, 0);
  const double w_corner = lat.omega_k(bz, bz);
  const double span = std::max({w_center, w_edge, w_corner}) -
                      std::min({w_center, w_edge, w_corner});
  REQUIRE(span > 150.0);
  REQUIRE(span < 3000.0);
}

TEST_CASE("near-field scaling: omega(0) grows as (lambda0/d)^3") {
  auto lat20 = make_lattice(0.05);
  auto lat40 = make_lattice(0.025);
  const double ratio = lat40.omega0() / lat20.omega0();
  REQUIRE(ratio > 7.0);
  REQUIRE(ratio < 9.0);
}

TEST_CASE("deep-subwavelength omega(0) approaches the quasi-static dipole sum") {
  const double s = static_dipole_sum_oracle();
  REQUIRE(s == Approx(4.5168).epsilon(2e-3));

  auto lat = make_lattice(1.0 / 360.0);
  const double x = lat.constants().k0() * lat.geometry().d;
  // omega(0) ~ -(3/4) S / (k0 d)^3 with O(k0 d) radiative corrections
  REQUIRE(lat.omega0() * x * x * x == Approx(-0.75 * s).epsilon(0.04));
}

TEST_CASE("windowed partial sums are Cauchy in the truncation radius") {
  auto lat = make_lattice(0.2);
  const double lam = lat.constants().lambda0;
  std::vector<Complex> s;
  double r = 1.8 * lam;
  for (int j = 0; j < 5; ++j) {
    s.push_back(lat.windowed_sum(0, 0, r));
    r *= std::sqrt(2.0);
  }
  std::vector<double> diff;
  for (std::size_t j = 0; j + 1 < s.size(); ++j)
    diff.push_back(std::abs(s[j + 1] - s[j]));
  for (std::size_t j = 0; j + 1 < diff.size(); ++j)
    REQUIRE(diff[j + 1] < diff[j]);
  // tightening the tolerance (hence enlarging the radius) leaves the
  // converged dispersion value in place
  const double loose = lat.mode_sum(0, 0, 1e-4).omega;
  const double tight = lat.mode_sum(0, 0, 1e-7).omega;
  REQUIRE(std::abs(tight - loose) < 1e-4 * std::max(1.0, std::abs(tight)));
}

TEST_CASE("single layer is a lossless perfect mirror on resonance") {
  auto lat = make_lattice(0.2);
  const auto on = lat.layer_response(lat.omega0());
  REQUIRE(on.r == Complex{-1.0, 0.0});
  REQUIRE(std::abs(on.t) == 0.0);
  REQUIRE(std::isnan(lat.transmission_phase(lat.omega0())));

  std::mt19937 rng(2024);
  std::uniform_real_distribution<double> u(-40.0, 40.0);
  for (int i = 0; i < 1000; ++i) {
    const auto lr = lat.layer_response(lat.omega0() + u(rng));
    REQUIRE(std::norm(lr.r) + std::norm(lr.t) == Approx(1.0).margin(1e-12));
  }
}

TEST_CASE("lossy self-energy breaks unitarity and mutes the array") {
  auto lat = make_lattice(0.2);
  const double g = lat.gamma0_collective();

  for (double ddelta : {-3.0, -0.5, 0.0, 0.7, 2.0}) {
    const auto lr = lat.layer_response(lat.omega0() + ddelta * g,
                                       Complex{0.0, -0.3 * g});
    REQUIRE(std::norm(lr.r) + std::norm(lr.t) < 1.0);
  }

  // strong loss: the array barely responds
  const Complex sigma{0.0, -50.0 * g};
  const auto lr = lat.layer_response(lat.omega0(), sigma);
  REQUIRE(std::abs(lr.r) == Approx(g / (2.0 * std::abs(sigma))).epsilon(2e-2));
  REQUIRE(std::abs(lr.t) > 0.98);
}

TEST_CASE("transmission phase profile across resonance") {
  auto lat = make_lattice(0.2);
  const double g = lat.gamma0_collective();
  const double w0 = lat.omega0();

  REQUIRE(std::abs(lat.transmission_phase(w0 + 1e4 * g)) < 1e-3);
  REQUIRE(std::abs(lat.transmission_phase(w0 - 1e4 * g)) < 1e-3);

  REQUIRE(lat.transmission_phase(w0 - g / 2) == Approx(pi / 4).epsilon(1e-10));
  REQUIRE(lat.transmission_phase(w0 + g / 2) == Approx(-pi / 4).epsilon(1e-10));
  REQUIRE(std::norm(lat.layer_response(w0 - g / 2).t) == Approx(0.5).epsilon(1e-12));

  // |phase| approaches pi/2 one-sidedly and never exceeds it
  double max_phase = 0.0;
  for (double e = -3.0; e <= 3.0; e += 1e-3) {
    const double ph = lat.transmission_phase(w0 + e * g);
    if (std::isnan(ph)) continue;
    max_phase = std::max(max_phase, std::abs(ph));
    REQUIRE(std::abs(ph) < pi / 2 + 1e-12);
  }
  REQUIRE(max_phase > pi / 2 - 0.05);
  REQUIRE(std::abs(lat.transmission_phase(w0 - 1e-8 * g)) ==
          Approx(pi / 2).margin(1e-6));
}

TEST_CASE("geometry validation") {
  PhysicalConstants consts;
  REQUIRE_THROWS_AS(LatticeGeometry::from_lambda0(1.5, 2.5, consts)
                        .validate(consts),
                    ConfigError);
  REQUIRE_THROWS_AS(LatticeGeometry::from_lambda0(-0.1, 2.5, consts)
                        .validate(consts),
                    ConfigError);
  auto geom = LatticeGeometry::from_lambda0(0.2, 2.5, consts);
  REQUIRE(geom.aspect() == Approx(2.5).epsilon(1e-12));
  auto bohr = LatticeGeometry::from_bohr(10.0, 2.5, consts);
  REQUIRE(bohr.d == Approx(10.0 * consts.a0).epsilon(1e-14));
}
