#include "dmcool/config.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"

using namespace dmcool;

namespace {

ConfigFile parse_text(const std::string& text) {
  std::istringstream in(text);
  return ConfigFile::parse(in, "<test>");
}

constexpr double kTwoPi = 6.283185307179586476925286766559;

}  // namespace

TEST_CASE("config parser: sections, comments, arrays") {
  ConfigFile cfg = parse_text(
      "# comment line\n"
      "[effective]\n"
      "n_modes = 2\n"
      "omega = 1, 1   ; trailing comment\n"
      "gamma = 1e-6, 1e-6\n"
      "kappa1 = 20\n"
      "delta_c = 1\n"
      "G1 = 0.1, 0.1\n"
      "Lambda = 0.1, 0.08\n"
      "chi_mag = 10\n"
      "phi = 0.5 pi\n"
      "n_th = 1000\n");
  EffectiveParams p = effective_from_config(cfg);
  CHECK(p.n_modes == 2);
  CHECK(p.kappa1 == 20.0);
  CHECK(p.Lambda[1] == 0.08);
  CHECK(p.phi == doctest::Approx(kTwoPi / 4.0).epsilon(1e-15));
  CHECK(p.n_th == 1000.0);
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("config parser: physical units") {
  ConfigFile cfg = parse_text(
      "[physical]\n"
      "n_modes = 2\n"
      "omega = 20, 20 MHz\n"
      "omega_c = 500 THz\n"
      "omega_L = 500 THz\n"
      "gamma = 1e-6, 1e-6 w1\n"
      "kappa1 = 100 w1\n"
      "kappa2 = 2000 w1\n"
      "g1 = 1e-4, 1e-4 w1\n"
      "g2 = 1e-4, 1e-4 w1\n"
      "eta = 1e-4, 1e-4 w1\n"
      "chi0 = 1e-3 w1\n"
      "P1 = 4 uW\n"
      "P2 = 4 uW\n"
      "delta_c = 10 w1\n"
      "delta_c_prime = 20 w1\n");
  PhysicalParams p = physical_from_config(cfg);
  const double w1 = kTwoPi * 20e6;
  CHECK(p.omega[0] == doctest::Approx(w1).epsilon(1e-14));
  CHECK(p.omega_c == doctest::Approx(kTwoPi * 500e12).epsilon(1e-14));
  CHECK(p.kappa1 == doctest::Approx(100.0 * w1).epsilon(1e-14));
  CHECK(p.gamma[1] == doctest::Approx(1e-6 * w1).epsilon(1e-14));
  CHECK(p.P1 == doctest::Approx(4e-6).epsilon(1e-14));
  CHECK(p.delta_c_prime == doctest::Approx(20.0 * w1).epsilon(1e-14));
  CHECK_NOTHROW(validate(p));
}

TEST_CASE("config parser: error reporting") {
  CHECK_THROWS_AS(parse_text("key_without_section = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_text("[effective\n"), ConfigError);
  CHECK_THROWS_AS(parse_text("[effective]\nno_equals_sign\n"), ConfigError);

  // unknown key
  CHECK_THROWS_AS(effective_from_config(parse_text("[effective]\nn_modes = 1\nbogus = 2\n")),
                  ConfigError);
  // wrong array length
  CHECK_THROWS_AS(
      effective_from_config(parse_text("[effective]\nn_modes = 2\nomega = 1, 1, 1\n")),
      ConfigError);
  // bad unit for the quantity
  CHECK_THROWS_AS(
      physical_from_config(parse_text("[physical]\nn_modes = 1\nomega = 1 uW\n")),
      ConfigError);
  // w1-relative unit without absolute omega
  CHECK_THROWS_AS(
      physical_from_config(parse_text("[physical]\nn_modes = 1\nkappa1 = 100 w1\n")),
      ConfigError);
  // missing n_modes
  CHECK_THROWS_AS(effective_from_config(parse_text("[effective]\nkappa1 = 1\n")), ConfigError);
}

TEST_CASE("meanfield solver config section") {
  ConfigFile cfg = parse_text(
      "[meanfield]\n"
      "tolerance = 1e-9\n"
      "max_iterations = 123\n"
      "strategy = relax_only\n");
  MeanFieldSolverConfig mc = meanfield_config_from_config(cfg);
  CHECK(mc.tolerance == 1e-9);
  CHECK(mc.max_iterations == 123);
  CHECK(mc.strategy == MeanFieldStrategy::RelaxOnly);

  // defaults when the section is absent
  MeanFieldSolverConfig dflt = meanfield_config_from_config(parse_text("[effective]\n"));
  CHECK(dflt.strategy == MeanFieldStrategy::RelaxThenNewton);
}

TEST_CASE("parameter paths: scalars, arrays, ratios") {
  EffectiveParams p;
  p.n_modes = 3;
  p.omega = {1.0, 1.0, 1.0};
  p.gamma = {1e-6, 1e-6, 1e-6};
  p.kappa1 = 1.0;
  p.G1 = {0.1, 0.1, 0.1};
  p.Lambda = {0.1, 0.08, 0.05};
  p.n_th = 0.0;

  set_path(p, "kappa1", 20.0);
  CHECK(p.kappa1 == 20.0);
  CHECK(get_path(p, "kappa1") == 20.0);

  set_path(p, "Lambda[3]", 0.064);
  CHECK(p.Lambda[2] == 0.064);
  CHECK(get_path(p, "Lambda[3]") == 0.064);

  // ratio path: numerator := value * denominator
  set_path(p, "Lambda[2]/Lambda[1]", 0.8);
  CHECK(p.Lambda[1] == doctest::Approx(0.08).epsilon(1e-15));
  CHECK(get_path(p, "Lambda[2]/Lambda[1]") == doctest::Approx(0.8).epsilon(1e-15));

  set_path(p, "omega[2]/omega[1]", 1.3);
  CHECK(p.omega[1] == doctest::Approx(1.3).epsilon(1e-15));
}

TEST_CASE("parameter paths: errors name the problem") {
  EffectiveParams p;
  p.n_modes = 2;
  p.omega = {1.0, 1.0};
  p.gamma = {1e-6, 1e-6};
  p.kappa1 = 1.0;
  p.G1 = {0.1, 0.1};
  p.Lambda = {0.1, 0.08};

  CHECK_THROWS_AS(set_path(p, "nope", 1.0), ValidationError);
  CHECK_THROWS_AS(set_path(p, "Lambda", 1.0), ValidationError);     // needs index
  CHECK_THROWS_AS(set_path(p, "kappa1[1]", 1.0), ValidationError);  // scalar
  CHECK_THROWS_AS(set_path(p, "Lambda[0]", 1.0), ValidationError);  // 1-based
  CHECK_THROWS_AS(set_path(p, "Lambda[3]", 1.0), ValidationError);  // out of range
  CHECK_THROWS_AS(set_path(p, "Lambda[", 1.0), ValidationError);
}

TEST_CASE("parameter paths: physical pseudo-path P sets both powers") {
  PhysicalParams p;
  p.n_modes = 1;
  p.omega = {1.0};
  p.gamma = {1.0};
  p.g1 = {0.0};
  p.g2 = {0.0};
  p.eta = {0.0};
  set_path(p, "P", 3e-6);
  CHECK(p.P1 == 3e-6);
  CHECK(p.P2 == 3e-6);
  CHECK(get_path(p, "P") == 3e-6);
  set_path(p, "omega[1]", 5.0);
  CHECK(p.omega[0] == 5.0);
}
