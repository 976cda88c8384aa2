#include "dmcool/darkmode.hpp"

#include <cmath>
#include <random>

#include "doctest.h"
#include "dmcool/dynamics.hpp"
#include "test_util.hpp"

using namespace dmcool;

TEST_CASE("hybrid_params: degenerate symmetric pair is dark") {
  auto h = hybrid_params(1.0, 1.0, 0.1, 0.1, 0.2, 0.2);
  CHECK(h.xi_w == 0.0);
  CHECK(h.xi_L == 0.0);
  CHECK(h.g_plus == doctest::Approx(std::sqrt(2.0) * 0.2).epsilon(1e-14));
  CHECK(h.omega_1w == doctest::Approx(1.0));
  CHECK(h.omega_2w == doctest::Approx(1.0));
  CHECK(h.dark);
}

TEST_CASE("hybrid_params: nonlinearity mismatch breaks the dark mode") {
  auto h = hybrid_params(1.0, 1.0, 0.1, 0.08, 0.1, 0.1);
  CHECK(h.xi_w == 0.0);
  CHECK(h.xi_L == doctest::Approx(0.01).epsilon(1e-14));  // (L1-L2)/2
  CHECK_FALSE(h.dark);
}

TEST_CASE("hybrid_params: single-coupled-mode limit") {
  auto h = hybrid_params(1.0, 1.4, 0.1, 0.3, 0.25, 0.0);
  CHECK(h.xi_w == 0.0);
  CHECK(h.xi_L == 0.0);
  CHECK(h.omega_1w == doctest::Approx(1.0));
  CHECK(h.omega_2w == doctest::Approx(1.4));
  CHECK(h.omega_1L == doctest::Approx(0.1));
  CHECK(h.omega_2L == doctest::Approx(0.3));
  CHECK(h.g_plus == doctest::Approx(0.25));
  CHECK(h.dark);  // the second mode is entirely decoupled
}

TEST_CASE("hybrid_params: zero coupling vector is refused") {
  CHECK_THROWS_AS(hybrid_params(1.0, 1.0, 0.1, 0.1, 0.0, 0.0), ValidationError);
}

TEST_CASE("is_dark: thresholding") {
  HybridModeAnalysis h;
  h.xi_w = 0.0;
  h.xi_L = 0.0;
  CHECK(is_dark(h, 1e-9));
  h.xi_L = 0.01;
  CHECK_FALSE(is_dark(h, 1e-6));
  CHECK(is_dark(h, 0.1));
  CHECK_THROWS_AS(is_dark(h, 0.0), ValidationError);
}

TEST_CASE("hybrid coefficients: exact identities over random draws") {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(0.02, 2.0);
  for (int rep = 0; rep < 2000; ++rep) {
    double w1 = u(rng), w2 = u(rng), l1 = u(rng), l2 = u(rng);
    double g11 = u(rng), g12 = u(rng);
    auto h = hybrid_params(w1, w2, l1, l2, g11, g12);

    // G_plus formula and dominance
    CHECK(h.g_plus == doctest::Approx(std::sqrt(g11 * g11 + g12 * g12)).epsilon(1e-12));
    CHECK(h.g_plus >= std::max(std::abs(g11), std::abs(g12)) * (1.0 - 1e-12));

    // label swap: hybrid coefficients are invariant, the mismatch couplings
    // flip sign exactly
    auto s = hybrid_params(w2, w1, l2, l1, g12, g11);
    CHECK(s.omega_1w == h.omega_1w);
    CHECK(s.omega_2w == h.omega_2w);
    CHECK(s.omega_1L == h.omega_1L);
    CHECK(s.omega_2L == h.omega_2L);
    CHECK(s.g_plus == h.g_plus);
    CHECK(s.xi_w == -h.xi_w);
    CHECK(s.xi_L == -h.xi_L);

    // xi_w vanishes iff the frequencies coincide (given g11 g12 != 0)
    auto d = hybrid_params(w1, w1, l1, l2, g11, g12);
    CHECK(d.xi_w == 0.0);
    if (w1 != w2) CHECK(h.xi_w != 0.0);
    auto dl = hybrid_params(w1, w2, l1, l1, g11, g12);
    CHECK(dl.xi_L == 0.0);

    // weighted-mean structure: omega_1w + omega_2w = w1 + w2
    CHECK(h.omega_1w + h.omega_2w == doctest::Approx(w1 + w2).epsilon(1e-12));
  }
}

TEST_CASE("pairwise_dark_scan: three-mode presets") {
  EffectiveParams p;
  p.n_modes = 3;
  p.omega = {1.0, 1.0, 1.0};
  p.gamma = {1e-6, 1e-6, 1e-6};
  p.kappa1 = 0.1;
  p.delta_c = 1.0;
  p.G1 = {0.3, 0.3, 0.3};
  p.Lambda = {0.1, 0.08, 0.1};  // Lambda3 = Lambda1
  p.chi_mag = 0.0;
  p.phi = 0.0;
  p.n_th = 1000.0;

  auto dark = pairwise_dark_scan(p);
  REQUIRE(dark.size() == 1);
  CHECK(dark[0].j == 0);
  CHECK(dark[0].k == 2);

  p.Lambda[2] = 0.08;  // Lambda3 = Lambda2
  dark = pairwise_dark_scan(p);
  REQUIRE(dark.size() == 1);
  CHECK(dark[0].j == 1);
  CHECK(dark[0].k == 2);

  p.Lambda = {0.1, 0.08, 0.064};  // all distinct
  CHECK(pairwise_dark_scan(p).empty());
}

TEST_CASE("pairwise_dark_scan: four-mode pattern") {
  EffectiveParams p;
  p.n_modes = 4;
  p.omega = {1.0, 1.0, 1.0, 1.0};
  p.gamma.assign(4, 1e-6);
  p.kappa1 = 0.1;
  p.delta_c = 1.0;
  p.G1.assign(4, 0.1);
  p.Lambda = {0.2, 0.16, 0.18, 0.9 * 0.2};  // Lambda4 = 0.9 Lambda1 = Lambda3
  p.chi_mag = 0.0;
  p.phi = 0.0;
  p.n_th = 1000.0;
  auto dark = pairwise_dark_scan(p);
  REQUIRE(dark.size() == 1);
  CHECK(dark[0].j == 2);
  CHECK(dark[0].k == 3);
}

TEST_CASE("pairwise_dark_scan: validation") {
  EffectiveParams p;
  p.n_modes = 1;
  p.omega = {1.0};
  p.gamma = {1e-6};
  p.kappa1 = 1.0;
  p.G1 = {0.1};
  p.Lambda = {0.0};
  CHECK_THROWS_AS(pairwise_dark_scan(p), ValidationError);
}

TEST_CASE("cross-module: a dark pair leaves a hot mechanical mode") {
  // If the pairwise scan reports a dark pair at chi = 0, the steady state
  // keeps a sizable fraction of the thermal load in some bare mode.
  EffectiveParams p = test::two_mode(1.0, 0.0, 0.05, 0.05);
  REQUIRE_FALSE(pairwise_dark_scan(p).empty());
  CoolingResult r = cooling_point(p);
  REQUIRE(r.stable);
  double worst = std::max(r.n[0], r.n[1]);
  CHECK(worst >= 0.1 * p.n_th);
}
