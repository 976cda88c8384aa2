#include "dmcool/sweep.hpp"

#include <cmath>
#include <sstream>

#include "doctest.h"
#include "test_util.hpp"

using namespace dmcool;

namespace {

SweepSpec small_cooling_spec(int points = 11) {
  SweepSpec spec;
  spec.kind = SweepKind::Cooling;
  spec.effective = test::two_mode(20.0, 10.0, 0.1, 0.1);
  spec.axis1 = linspace_axis("Lambda[2]/Lambda[1]", 0.2, 0.8, points);
  return spec;
}

}  // namespace

TEST_CASE("presets: ids, required inputs, grids") {
  auto ids = preset_ids();
  REQUIRE(ids.size() == 6);
  CHECK_THROWS_AS(preset("fig9"), ValidationError);

  SweepSpec f2 = preset("fig2");
  CHECK(f2.kind == SweepKind::MeanField);
  CHECK(f2.axis1.path == "P");
  CHECK(f2.axis1.values.size() == 101);
  CHECK(f2.zero_beta_phase);
  CHECK(missing_inputs(f2).empty());
  CHECK(f2.physical.kappa2 == doctest::Approx(2000.0 * f2.physical.omega[0]));

  SweepSpec f3 = preset("fig3");
  REQUIRE(f3.axis2.has_value());
  CHECK(f3.axis1.path == "omega[2]/omega[1]");
  CHECK(f3.axis2->path == "kappa1");
  CHECK(missing_inputs(f3).size() == 2);

  SweepSpec f5 = preset("fig5");
  CHECK(missing_inputs(f5).size() == 2);
  apply_set(f5, "kappa1", 20.0);
  apply_set(f5, "chi_mag", 10.0);
  CHECK(missing_inputs(f5).empty());
  CHECK(f5.effective.kappa1 == 20.0);

  SweepSpec f6 = preset("fig6");
  CHECK(f6.effective.n_modes == 3);
  CHECK(f6.effective.G1[0] == 0.3);
  CHECK(f6.effective.Lambda[1] == doctest::Approx(0.08));
  CHECK(f6.axis1.values.front() == doctest::Approx(0.2));
  CHECK(f6.axis1.values.back() == doctest::Approx(1.2));

  SweepSpec f7 = preset("fig7");
  CHECK(f7.effective.n_modes == 4);
  CHECK(f7.effective.Lambda[0] == doctest::Approx(0.2));
  CHECK(f7.effective.Lambda[2] == doctest::Approx(0.18));

  CHECK(!preset_describe("fig6").empty());
}

TEST_CASE("run_sweep: refuses to run with unset required inputs") {
  SweepSpec f5 = preset("fig5");
  CHECK_THROWS_AS(run_sweep(f5), ValidationError);
}

TEST_CASE("run_sweep: 1x1 grid equals cooling_point") {
  SweepSpec spec = small_cooling_spec();
  spec.axis1 = linspace_axis("Lambda[2]/Lambda[1]", 0.5, 0.5, 1);
  SweepResult r = run_sweep(spec);
  REQUIRE(r.rows.size() == 1);

  EffectiveParams p = spec.effective;
  set_path(p, "Lambda[2]/Lambda[1]", 0.5);
  CoolingResult direct = cooling_point(p);
  auto cell = [&](const std::string& name) {
    auto it = std::find(r.columns.begin(), r.columns.end(), name);
    REQUIRE(it != r.columns.end());
    return *r.rows[0].cells[it - r.columns.begin()];
  };
  CHECK(cell("stable") == 1.0);
  CHECK(cell("n_1") == direct.n[0]);
  CHECK(cell("n_2") == direct.n[1]);
  CHECK(cell("n_cavity") == direct.n_cavity);
  CHECK(cell("max_re_eigenvalue") == direct.max_re_eigenvalue);
}

TEST_CASE("run_sweep: deterministic row order and parallel equivalence") {
  SweepSpec spec = small_cooling_spec(13);
  spec.axis2 = linspace_axis("kappa1", 10.0, 30.0, 3);
  SweepResult serial = run_sweep(spec, 1);
  SweepResult parallel = run_sweep(spec, 4);
  std::ostringstream a, b;
  emit(serial, EmitFormat::Csv, a);
  emit(parallel, EmitFormat::Csv, b);
  CHECK(a.str() == b.str());  // byte-identical under any schedule

  // axis2-major ordering: axis1 value cycles fastest
  REQUIRE(serial.rows.size() == 13 * 3);
  CHECK(*serial.rows[0].cells[0] == doctest::Approx(0.2));
  CHECK(*serial.rows[1].cells[0] == doctest::Approx(0.25));
  CHECK(*serial.rows[0].cells[1] == doctest::Approx(10.0));
  CHECK(*serial.rows[13].cells[1] == doctest::Approx(20.0));
}

TEST_CASE("run_sweep: per-point failures are flagged rows, not aborts") {
  SweepSpec spec = small_cooling_spec(5);
  // invalid parameter at every point: negative gamma
  spec.effective.gamma[0] = -1.0;
  SweepResult r = run_sweep(spec);
  REQUIRE(r.rows.size() == 5);
  for (const auto& row : r.rows) {
    CHECK_FALSE(row.evaluated);
    CHECK(row.error.find("gamma") != std::string::npos);
  }
}

TEST_CASE("run_sweep: unstable rows carry no phonon values") {
  SweepSpec spec;
  spec.kind = SweepKind::Cooling;
  spec.effective = test::two_mode(0.1, 2.0, 0.0, 0.0);  // |chi| > sqrt(D^2 + k^2/4)
  spec.axis1 = linspace_axis("chi_mag", 1.5, 2.5, 3);
  SweepResult r = run_sweep(spec);
  auto stable_it = std::find(r.columns.begin(), r.columns.end(), "stable");
  auto n1_it = std::find(r.columns.begin(), r.columns.end(), "n_1");
  REQUIRE(stable_it != r.columns.end());
  REQUIRE(n1_it != r.columns.end());
  for (const auto& row : r.rows) {
    REQUIRE(row.evaluated);
    CHECK(*row.cells[stable_it - r.columns.begin()] == 0.0);
    CHECK_FALSE(row.cells[n1_it - r.columns.begin()].has_value());
  }
}

TEST_CASE("run_sweep: meanfield kind produces the power-sweep table") {
  SweepSpec f2 = preset("fig2");
  resize_axes(f2, 6);
  SweepResult r = run_sweep(f2);
  REQUIRE(r.rows.size() == 6);
  CHECK(r.columns.front() == "P_watt");
  CHECK(r.columns.back() == "converged");
  // P = 0 row: all amplitudes zero
  CHECK(*r.rows[0].cells[1] == 0.0);
  CHECK(*r.rows[0].cells[2] == 0.0);
  // amplitudes grow with P
  double prev = 0.0;
  for (const auto& row : r.rows) {
    CHECK(*row.cells[2] >= prev - 1e-12);
    prev = *row.cells[2];
    CHECK(*row.cells.back() == 1.0);
  }
}

TEST_CASE("find_peaks: monotone, spike, and affine invariance") {
  SweepSpec spec = small_cooling_spec(9);
  SweepResult r = run_sweep(spec);
  // craft synthetic columns on top of the result structure
  auto set_column = [&](const std::vector<double>& y) {
    auto it = std::find(r.columns.begin(), r.columns.end(), "n_1");
    size_t ci = it - r.columns.begin();
    for (size_t i = 0; i < r.rows.size(); ++i) r.rows[i].cells[ci] = y[i];
  };

  set_column({1, 2, 3, 4, 5, 6, 7, 8, 9});  // monotone: no peaks
  CHECK(find_peaks(r, "n_1", 0.05).empty());

  set_column({1, 1, 1, 1, 50, 1, 1, 1, 1});  // single spike
  auto peaks = find_peaks(r, "n_1", 0.05);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0] == doctest::Approx(spec.axis1.values[4]));

  // affine rescaling leaves the peak set unchanged
  std::vector<double> y = {2, 7, 3, 3, 8, 1, 9, 2, 2};
  set_column(y);
  auto base = find_peaks(r, "n_1", 0.2);
  for (double scale : {3.0, 0.01}) {
    for (double shift : {-5.0, 1000.0}) {
      std::vector<double> z = y;
      for (double& v : z) v = scale * v + shift;
      set_column(z);
      auto rescaled = find_peaks(r, "n_1", 0.2);
      REQUIRE(rescaled.size() == base.size());
      for (size_t i = 0; i < base.size(); ++i) CHECK(rescaled[i] == base[i]);
    }
  }

  // constant column: no peaks
  set_column({4, 4, 4, 4, 4, 4, 4, 4, 4});
  CHECK(find_peaks(r, "n_1", 0.05).empty());

  // plateau peak reported once, at its middle
  set_column({1, 1, 9, 9, 9, 1, 1, 1, 1});
  peaks = find_peaks(r, "n_1", 0.05);
  REQUIRE(peaks.size() == 1);
  CHECK(peaks[0] == doctest::Approx(spec.axis1.values[3]));

  CHECK_THROWS_AS(find_peaks(r, "no_such_column", 0.05), ValidationError);
  CHECK_THROWS_AS(find_peaks(r, "n_1", 0.0), ValidationError);
}

TEST_CASE("emit: empty output selection gives a header-only CSV") {
  SweepSpec spec = small_cooling_spec(5);
  spec.outputs = std::vector<std::string>{};
  SweepResult r = run_sweep(spec);
  std::ostringstream out;
  emit(r, EmitFormat::Csv, out);
  CHECK(out.str() == "Lambda[2]/Lambda[1]\n");
}

TEST_CASE("emit: output selection controls the columns") {
  SweepSpec spec = small_cooling_spec(3);
  spec.outputs = std::vector<std::string>{"n", "stable"};
  SweepResult r = run_sweep(spec);
  REQUIRE(r.columns.size() == 4);  // axis + n_1 + n_2 + stable
  CHECK(r.columns[1] == "n_1");
  CHECK(r.columns[2] == "n_2");
  CHECK(r.columns[3] == "stable");

  SweepSpec bad = small_cooling_spec(3);
  bad.outputs = std::vector<std::string>{"bogus"};
  CHECK_THROWS_AS(run_sweep(bad), ValidationError);
}

TEST_CASE("emit: determinism and json round trip") {
  SweepSpec spec = small_cooling_spec(7);
  spec.dark_scan = true;
  SweepResult r1 = run_sweep(spec);
  SweepResult r2 = run_sweep(spec);
  std::ostringstream c1, c2, j1, j2;
  emit(r1, EmitFormat::Csv, c1);
  emit(r2, EmitFormat::Csv, c2);
  CHECK(c1.str() == c2.str());
  emit(r1, EmitFormat::Json, j1);
  emit(r2, EmitFormat::Json, j2);
  CHECK(j1.str() == j2.str());

  // round trip: load the JSON, emit again, byte-identical both ways
  std::istringstream in(j1.str());
  SweepResult loaded = load_sweep_result_json(in);
  std::ostringstream j3, c3;
  emit(loaded, EmitFormat::Json, j3);
  CHECK(j3.str() == j1.str());
  emit(loaded, EmitFormat::Csv, c3);
  CHECK(c3.str() == c1.str());
}

TEST_CASE("emit: csv uses full float precision") {
  SweepSpec spec = small_cooling_spec(3);
  SweepResult r = run_sweep(spec);
  std::ostringstream out;
  emit(r, EmitFormat::Csv, out);
  std::istringstream in(out.str());
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  // re-parse the axis value: must round-trip exactly
  double v = std::stod(line.substr(0, line.find(',')));
  CHECK(v == spec.axis1.values[0]);
}

TEST_CASE("spec_from_config: cooling sweep") {
  std::istringstream text(
      "[effective]\n"
      "n_modes = 2\n"
      "omega = 1, 1\n"
      "gamma = 1e-6, 1e-6\n"
      "kappa1 = 20\n"
      "delta_c = 1\n"
      "G1 = 0.1, 0.1\n"
      "Lambda = 0.1, 0.05\n"
      "chi_mag = 10\n"
      "phi = 0.5 pi\n"
      "n_th = 1000\n"
      "[sweep]\n"
      "axis1 = Lambda[2]/Lambda[1] : 0.2 : 0.8 : 7\n"
      "outputs = n, stable\n"
      "dark_scan = 1\n");
  ConfigFile cfg = ConfigFile::parse(text, "<test>");
  SweepSpec spec = spec_from_config(cfg);
  CHECK(spec.kind == SweepKind::Cooling);
  CHECK(spec.axis1.values.size() == 7);
  CHECK(spec.dark_scan);
  REQUIRE(spec.outputs.has_value());
  CHECK(spec.outputs->size() == 2);
  SweepResult r = run_sweep(spec);
  CHECK(r.rows.size() == 7);

  // dark_pairs column filled at the degenerate point
  SweepSpec spec2 = spec;
  spec2.axis1 = linspace_axis("Lambda[2]/Lambda[1]", 1.0, 1.0, 1);
  spec2.outputs = std::nullopt;
  SweepResult r2 = run_sweep(spec2);
  CHECK(r2.rows[0].dark_pairs == "1-2");
}

TEST_CASE("spec_from_config: errors") {
  std::istringstream no_axis(
      "[effective]\n"
      "n_modes = 1\n"
      "omega = 1\n"
      "gamma = 1e-6\n"
      "kappa1 = 1\n"
      "G1 = 0.1\n"
      "Lambda = 0\n"
      "[sweep]\n"
      "outputs = n\n");
  ConfigFile cfg1 = ConfigFile::parse(no_axis, "<test>");
  CHECK_THROWS_AS(spec_from_config(cfg1), ConfigError);

  std::istringstream both(
      "[effective]\n"
      "n_modes = 1\n"
      "[physical]\n"
      "n_modes = 1\n"
      "[sweep]\n"
      "axis1 = kappa1 : 1 : 2 : 3\n");
  ConfigFile cfg2 = ConfigFile::parse(both, "<test>");
  CHECK_THROWS_AS(spec_from_config(cfg2), ConfigError);
}

TEST_CASE("emit_to_file: unwritable destination raises an I/O error") {
  SweepSpec spec = small_cooling_spec(3);
  SweepResult r = run_sweep(spec);
  CHECK_THROWS_AS(emit_to_file(r, EmitFormat::Csv, "/nonexistent-dir/out.csv"), IoError);
}

TEST_CASE("single-point json records") {
  EffectiveParams p = test::two_mode(20.0, 10.0, 0.1, 0.05);
  CoolingResult r = cooling_point(p);
  std::string record = cooling_point_json(p, r);
  CHECK(record.find("\"stable\": true") != std::string::npos);
  CHECK(record.find("\"n\"") != std::string::npos);
  CHECK(record.find("\"inputs\"") != std::string::npos);

  std::string dark = dark_scan_json(p, kDarkThreshold);
  CHECK(dark.find("\"pairs\"") != std::string::npos);
  CHECK(dark.find("\"xi_L\"") != std::string::npos);
}
