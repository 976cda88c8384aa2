#include "dmcool/dynamics.hpp"

#include <cmath>

#include "doctest.h"
#include "test_util.hpp"

using namespace dmcool;
using dmcool::test::two_mode;

namespace {

constexpr double kPi = 3.141592653589793238462643383279;

EffectiveParams decoupled(int n, double n_th) {
  EffectiveParams p;
  p.n_modes = n;
  p.omega.assign(n, 1.0);
  p.gamma.assign(n, 1e-6);
  p.kappa1 = 1.0;
  p.delta_c = 1.0;
  p.G1.assign(n, 0.0);
  p.Lambda.assign(n, 0.0);
  p.chi_mag = 0.0;
  p.phi = 0.0;
  p.n_th = n_th;
  return p;
}

}  // namespace

TEST_CASE("build_drift: cavity block with chi = 0") {
  EffectiveParams p = two_mode(2.0, 0.0, 0.0, 0.0);
  DenseMatrix a = build_drift(p);
  CHECK(a.rows() == 6);
  CHECK(a(0, 0) == doctest::Approx(-1.0));  // -kappa/2
  CHECK(a(0, 1) == doctest::Approx(1.0));   // +delta_c
  CHECK(a(1, 0) == doctest::Approx(-1.0));  // -delta_c
  CHECK(a(1, 1) == doctest::Approx(-1.0));
}

TEST_CASE("build_drift: phi = pi/2 flips the squeezing quadrature") {
  // cos 2phi = -1, sin 2phi = 0
  EffectiveParams p = two_mode(2.0, 0.7, 0.0, 0.0);
  DenseMatrix a = build_drift(p);
  CHECK(a(0, 0) == doctest::Approx(-0.7 - 1.0).epsilon(1e-12));
  CHECK(a(0, 1) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(a(1, 0) == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(a(1, 1) == doctest::Approx(0.7 - 1.0).epsilon(1e-12));
}

TEST_CASE("build_drift: three-mode 8x8 block structure") {
  EffectiveParams p;
  p.n_modes = 3;
  p.omega = {1.0, 1.0, 1.0};
  p.gamma = {1e-6, 1e-6, 1e-6};
  p.kappa1 = 0.1;
  p.delta_c = 1.0;
  p.G1 = {0.3, 0.3, 0.3};
  p.Lambda = {0.1, 0.08, 0.064};
  p.chi_mag = 0.0;
  p.phi = 0.5 * kPi;
  p.n_th = 1000.0;
  DenseMatrix a = build_drift(p);
  REQUIRE(a.rows() == 8);
  for (int j = 0; j < 3; ++j) {
    int r = 2 + 2 * j;
    CHECK(a(r, r) == doctest::Approx(-5e-7));
    CHECK(a(r, r + 1) == doctest::Approx(1.0));
    CHECK(a(r + 1, r) == doctest::Approx(-1.0 - 4.0 * p.Lambda[j]).epsilon(1e-14));
    CHECK(a(r + 1, r + 1) == doctest::Approx(-5e-7));
    CHECK(a(1, r) == doctest::Approx(0.6));      // 2 G
    CHECK(a(r + 1, 0) == doctest::Approx(0.6));  // 2 G
    CHECK(a(0, r) == 0.0);
    CHECK(a(r, 0) == 0.0);
    CHECK(a(r, 1) == 0.0);
  }
  // mechanical blocks do not couple to each other directly
  CHECK(a(3, 4) == 0.0);
  CHECK(a(5, 2) == 0.0);
  CHECK(a(7, 4) == 0.0);
}

TEST_CASE("build_noise: bath occupancies") {
  EffectiveParams p = two_mode(1.0, 0.0, 0.0, 0.0);
  p.n_th = 0.0;
  DenseMatrix d0 = build_noise(p);
  CHECK(d0(0, 0) == doctest::Approx(0.5));
  CHECK(d0(2, 2) == doctest::Approx(0.5e-6));

  p.n_th = 1000.0;
  DenseMatrix d1 = build_noise(p);
  CHECK(d1(2, 2) == doctest::Approx(1000.5e-6).epsilon(1e-12));
  CHECK(d1(3, 3) == doctest::Approx(1000.5e-6).epsilon(1e-12));
  CHECK(d1(0, 0) == doctest::Approx(0.5));
  // off-diagonals all zero
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j)
      if (i != j) CHECK(d1(i, j) == 0.0);

  EffectiveParams one = decoupled(1, 7.0);
  DenseMatrix dn = build_noise(one);
  REQUIRE(dn.rows() == 4);
  CHECK(dn(0, 0) == doctest::Approx(0.5));
  CHECK(dn(1, 1) == doctest::Approx(0.5));
  CHECK(dn(2, 2) == doctest::Approx(1e-6 * 15.0 / 2.0));
  CHECK(dn(3, 3) == doctest::Approx(1e-6 * 15.0 / 2.0));

  // per-mode bath override
  EffectiveParams pm = two_mode(1.0, 0.0, 0.0, 0.0);
  pm.n_th = 1000.0;
  pm.n_th_modes = {10.0, 20.0};
  DenseMatrix dm = build_noise(pm);
  CHECK(dm(2, 2) == doctest::Approx(1e-6 * 21.0 / 2.0));
  CHECK(dm(4, 4) == doctest::Approx(1e-6 * 41.0 / 2.0));
}

TEST_CASE("is_stable: basic classifications") {
  DenseMatrix a = DenseMatrix::identity(3);
  a *= -1.0;
  StabilityReport r = is_stable(a);
  CHECK(r.stable);
  CHECK(r.max_re_eigenvalue == doctest::Approx(-1.0));

  // cavity-only model with |chi|^2 > delta^2 + kappa^2/4 is unstable
  EffectiveParams p;
  p.n_modes = 1;
  p.omega = {1.0};
  p.gamma = {1e-6};
  p.kappa1 = 0.1;
  p.delta_c = 1.0;
  p.G1 = {0.0};
  p.Lambda = {0.0};
  p.chi_mag = 2.0;
  p.phi = 0.5 * kPi;
  p.n_th = 0.0;
  StabilityReport ru = is_stable(build_drift(p));
  CHECK_FALSE(ru.stable);
  CHECK(ru.max_re_eigenvalue ==
        doctest::Approx(-0.05 + std::sqrt(4.0 - 1.0)).epsilon(1e-9));

  // strongly squeezed but heavily damped cavity stays stable
  EffectiveParams f5 = two_mode(20.0, 10.0, 0.1, 0.05);
  CHECK(is_stable(build_drift(f5)).stable);
}

TEST_CASE("phonon_numbers: vacuum, thermal, and dimension checks") {
  DenseMatrix v = DenseMatrix::identity(6);
  v *= 0.5;
  auto n = phonon_numbers(v, 2);
  CHECK(n[0] == doctest::Approx(0.0));
  CHECK(n[1] == doctest::Approx(0.0));

  DenseMatrix vt = DenseMatrix::identity(6);
  vt *= 0.5;
  for (int k = 2; k < 6; ++k) vt(k, k) = (2.0 * 1000.0 + 1.0) / 2.0;
  auto nt = phonon_numbers(vt, 2);
  CHECK(nt[0] == doctest::Approx(1000.0));
  CHECK(nt[1] == doctest::Approx(1000.0));

  CHECK_THROWS_AS(phonon_numbers(v, 3), ValidationError);
}

TEST_CASE("cooling_point: decoupled thermal model is exact") {
  for (int n_modes : {1, 2, 3, 4}) {
    EffectiveParams p = decoupled(n_modes, 1000.0);
    CoolingResult r = cooling_point(p);
    REQUIRE(r.stable);
    for (int j = 0; j < n_modes; ++j)
      CHECK(std::abs(r.n[j] - 1000.0) <= 1e-9 * 1000.0);
    CHECK(std::abs(r.n_cavity) <= 1e-9);
    CHECK(r.lyapunov_residual <= 1e-10);
  }
}

TEST_CASE("cooling_point: unstable point carries diagnostics and no covariance") {
  EffectiveParams p = two_mode(0.1, 2.0, 0.0, 0.0);
  CoolingResult r = cooling_point(p);
  CHECK_FALSE(r.stable);
  CHECK(r.max_re_eigenvalue > 0.0);
  CHECK(r.v.empty());
  CHECK(r.n.empty());
}

TEST_CASE("cooling_point: squeezed-cavity cooling reaches the ground state") {
  // kappa  = 20, |chi| = 10, distinct Duffing shifts: both modes below one
  // phonon even though kappa >> omega
  EffectiveParams p = two_mode(20.0, 10.0, 0.1, 0.05);
  CoolingResult r = cooling_point(p);
  REQUIRE(r.stable);
  CHECK(r.n[0] < 1.0);
  CHECK(r.n[1] < 1.0);
  CHECK(r.n[0] > 0.0);
  CHECK(r.lyapunov_residual <= 1e-10);
}

TEST_CASE("cooling_point: degenerate dark mode pins half the thermal load") {
  EffectiveParams p = two_mode(1.0, 0.0, 0.0, 0.0);
  CoolingResult r = cooling_point(p);
  REQUIRE(r.stable);
  CHECK(std::abs(r.n[0] - r.n[1]) <= 1e-9);
  CHECK(r.n[0] >= 100.0);
  // bright mode cools well here, so each bare mode keeps ~ n_th/2
  CHECK(r.n[0] == doctest::Approx(500.0).epsilon(0.01));
}

TEST_CASE("evolve_cooling: steady covariance is a fixed point; t=0 returns V0") {
  EffectiveParams p = two_mode(1.0, 0.3, 0.1, 0.05);
  CoolingResult r = cooling_point(p);
  REQUIRE(r.stable);
  CoolingTrajectory traj = evolve_cooling(p, r.v, {0.0, 5.0, 20.0});
  for (const auto& v : traj.v) {
    DenseMatrix diff = v - r.v;
    CHECK(diff.frobenius_norm() <= 1e-8 * r.v.frobenius_norm());
  }
  DenseMatrix v0 = thermal_covariance(p);
  CoolingTrajectory t0 = evolve_cooling(p, v0, {0.0});
  DenseMatrix d0 = t0.v[0] - v0;
  CHECK(d0.frobenius_norm() == 0.0);
}

TEST_CASE("evolve_cooling: thermal start converges to the Lyapunov steady state") {
  EffectiveParams p;
  p.n_modes = 1;
  p.omega = {1.0};
  p.gamma = {1e-2};
  p.kappa1 = 1.0;
  p.delta_c = 1.0;
  p.G1 = {0.2};
  p.Lambda = {0.05};
  p.chi_mag = 0.3;
  p.phi = 0.3 * kPi;
  p.n_th = 10.0;
  CoolingResult r = cooling_point(p);
  REQUIRE(r.stable);
  double horizon = 60.0 / (-r.max_re_eigenvalue);
  CoolingTrajectory traj = evolve_cooling(p, thermal_covariance(p), {horizon});
  DenseMatrix diff = traj.v[0] - r.v;
  CHECK(diff.frobenius_norm() / r.v.frobenius_norm() <= 1e-6);
  CHECK(traj.n[0][0] == doctest::Approx(r.n[0]).epsilon(1e-5));
}

TEST_CASE("invariant: Lyapunov residual on sampled stable points") {
  for (const auto& p :
       {two_mode(0.5, 0.0, 0.0, 0.0), two_mode(20.0, 10.0, 0.1, 0.02),
        two_mode(5.0, 2.0, 0.1, 0.1), two_mode(1.0, 0.0, 0.1, 0.08, 1.3, 0.2)}) {
    CoolingResult r = cooling_point(p);
    if (!r.stable) continue;
    CHECK(r.lyapunov_residual <= 1e-10);
  }
}

TEST_CASE("invariant: mode label swap permutes the phonon numbers") {
  EffectiveParams p;
  p.n_modes = 2;
  p.omega = {1.0, 1.2};
  p.gamma = {1e-6, 2e-6};
  p.kappa1 = 1.0;
  p.delta_c = 1.0;
  p.G1 = {0.1, 0.15};
  p.Lambda = {0.1, 0.05};
  p.chi_mag = 0.3;
  p.phi = 0.7;
  p.n_th = 100.0;
  CoolingResult r1 = cooling_point(p);

  EffectiveParams q = p;
  std::swap(q.omega[0], q.omega[1]);
  std::swap(q.gamma[0], q.gamma[1]);
  std::swap(q.G1[0], q.G1[1]);
  std::swap(q.Lambda[0], q.Lambda[1]);
  CoolingResult r2 = cooling_point(q);

  REQUIRE(r1.stable);
  REQUIRE(r2.stable);
  CHECK(std::abs(r1.n[0] - r2.n[1]) <= 1e-10 * (1.0 + std::abs(r1.n[0])));
  CHECK(std::abs(r1.n[1] - r2.n[0]) <= 1e-10 * (1.0 + std::abs(r1.n[1])));
  CHECK(r1.n_cavity == doctest::Approx(r2.n_cavity).epsilon(1e-10));
}

TEST_CASE("invariant: phonon numbers are nondecreasing in the bath occupation") {
  EffectiveParams p = two_mode(1.0, 0.3, 0.1, 0.05);
  double prev0 = -1.0, prev1 = -1.0;
  for (double nth : {0.0, 1.0, 10.0, 100.0, 1000.0}) {
    p.n_th = nth;
    CoolingResult r = cooling_point(p);
    REQUIRE(r.stable);
    CHECK(r.n[0] >= prev0 - 1e-12);
    CHECK(r.n[1] >= prev1 - 1e-12);
    prev0 = r.n[0];
    prev1 = r.n[1];
  }
}

TEST_CASE("invariant: removing the decoupled hybrid mode reproduces the occupations") {
  // Degenerate symmetric case: the antisymmetric hybrid mode decouples
  // exactly. Replace it by its isolated steady occupation and compare with
  // the reduced single-mode model carrying the bright coupling sqrt(2) G.
  auto reduced_prediction = [](double kappa, double g, double lambda, double n_th) {
    EffectiveParams bright;
    bright.n_modes = 1;
    bright.omega = {1.0};
    bright.gamma = {1e-6};
    bright.kappa1 = kappa;
    bright.delta_c = 1.0;
    bright.G1 = {std::sqrt(2.0) * g};
    bright.Lambda = {lambda};
    bright.chi_mag = 0.0;
    bright.phi = 0.0;
    bright.n_th = n_th;
    CoolingResult rb = cooling_point(bright);
    REQUIRE(rb.stable);

    // isolated dark-block occupation from the 2x2 steady state
    DenseMatrix a(2, 2), q(2, 2);
    a(0, 0) = a(1, 1) = -0.5e-6;
    a(0, 1) = 1.0;
    a(1, 0) = -1.0 - 4.0 * lambda;
    q(0, 0) = q(1, 1) = 1e-6 * (2.0 * n_th + 1.0) / 2.0;
    DenseMatrix x = solve_lyapunov(a, q);
    double n_dark = (x(0, 0) + x(1, 1) - 1.0) / 2.0;
    return 0.5 * (rb.n[0] + n_dark);
  };

  // Lambda = 0: the dark occupation is exactly n_th
  {
    EffectiveParams p = two_mode(1.0, 0.0, 0.0, 0.0);
    CoolingResult full = cooling_point(p);
    REQUIRE(full.stable);
    double pred = reduced_prediction(1.0, 0.1, 0.0, 1000.0);
    CHECK(std::abs(full.n[0] - pred) <= 1e-6 * 1000.0);
    CHECK(std::abs(full.n[1] - pred) <= 1e-6 * 1000.0);
  }
  // equal nonzero Lambda: still decoupled, dark occupation from its own block
  {
    EffectiveParams p = two_mode(1.0, 0.0, 0.05, 0.05);
    CoolingResult full = cooling_point(p);
    REQUIRE(full.stable);
    double pred = reduced_prediction(1.0, 0.1, 0.05, 1000.0);
    CHECK(std::abs(full.n[0] - pred) <= 1e-6 * 1000.0);
  }
}
