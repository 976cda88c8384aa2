#include "dmcool/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>

#include "dmcool/version.hpp"
#include "json.hpp"

namespace dmcool {

namespace {

using ordered_json = nlohmann::ordered_json;

constexpr double kPi = 3.141592653589793238462643383279;

std::string join_pairs(const std::vector<ModePairAnalysis>& pairs) {
  std::string out;
  for (const auto& p : pairs) {
    if (!out.empty()) out += ';';
    out += std::to_string(p.j + 1) + "-" + std::to_string(p.k + 1);
  }
  return out;
}

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

SweepAxis linspace_axis(const std::string& path, double lo, double hi, int count) {
  if (count < 1) throw ValidationError("axis '" + path + "': count must be at least 1");
  if (count > 1 && lo == hi)
    throw ValidationError("axis '" + path + "': grid must be strictly monotone");
  SweepAxis axis;
  axis.path = path;
  axis.values.resize(count);
  if (count == 1) {
    axis.values[0] = lo;
  } else {
    for (int i = 0; i < count; ++i)
      axis.values[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1);
  }
  return axis;
}

// ---------------------------------------------------------------------------
// presets
// ---------------------------------------------------------------------------

namespace {

EffectiveParams effective_base(int n, double g, double lambda_fill) {
  EffectiveParams p;
  p.n_modes = n;
  p.omega.assign(n, 1.0);
  p.gamma.assign(n, 1e-6);
  p.kappa1 = 0.0;  // placeholder; preset axis or required input supplies it
  p.delta_c = 1.0;
  p.G1.assign(n, g);
  p.Lambda.assign(n, lambda_fill);
  p.chi_mag = 0.0;
  p.phi = 0.5 * kPi;
  p.n_th = 1000.0;
  return p;
}

SweepSpec preset_fig2() {
  SweepSpec s;
  s.kind = SweepKind::MeanField;
  s.preset_id = "fig2";
  const double w1 = 2.0 * kPi * 20e6;
  PhysicalParams& p = s.physical;
  p.n_modes = 2;
  p.omega.assign(p.n_modes, w1);
  p.omega_c = 2.0 * kPi * 500e12;
  p.omega_L = p.omega_c;
  p.gamma.assign(p.n_modes, 1e-6 * w1);
  p.kappa1 = 100.0 * w1;
  p.kappa2 = 2000.0 * w1;
  p.g1.assign(p.n_modes, 1e-4 * w1);
  p.g2.assign(p.n_modes, 1e-4 * w1);
  p.eta.assign(p.n_modes, 1e-4 * w1);
  p.chi0 = 1e-3 * w1;
  p.delta_c = 10.0 * w1;
  p.delta_c_prime = 20.0 * w1;
  s.zero_beta_phase = true;
  s.axis1 = linspace_axis("P", 0.0, 4e-6, 101);
  return s;
}

SweepSpec preset_fig3() {
  SweepSpec s;
  s.preset_id = "fig3";
  s.effective = effective_base(2, 0.1, 0.0);
  s.axis1 = linspace_axis("omega[2]/omega[1]", 0.5, 1.5, 61);
  s.axis2 = linspace_axis("kappa1", 0.2, 10.0, 61);
  s.required = {
      {"Lambda[1]", "panels (a,b): 0 (no mechanical nonlinearity); panels (c,d): not printed"},
      {"Lambda[2]", "panels (a,b): 0 (no mechanical nonlinearity); panels (c,d): not printed"},
  };
  return s;
}

SweepSpec preset_fig4() {
  SweepSpec s;
  s.preset_id = "fig4";
  s.effective = effective_base(2, 0.1, 0.1);
  s.axis1 = linspace_axis("Lambda[2]/Lambda[1]", 0.0, 1.2, 61);
  s.axis2 = linspace_axis("kappa1", 0.2, 10.0, 61);
  s.required = {
      {"omega[2]", "per-panel, not printed; reading: (a,b) 1 (degenerate), (c,d) detuned"},
  };
  return s;
}

SweepSpec preset_fig5() {
  SweepSpec s;
  s.preset_id = "fig5";
  s.effective = effective_base(2, 0.1, 0.1);
  s.axis1 = linspace_axis("Lambda[2]/Lambda[1]", 0.0, 1.0, 101);
  s.required = {
      {"kappa1", "20 is the printed value for all three curves"},
      {"chi_mag", "curves: 0 (red), 5 (green), 10 (blue)"},
  };
  return s;
}

SweepSpec preset_fig6() {
  SweepSpec s;
  s.preset_id = "fig6";
  s.effective = effective_base(3, 0.3, 0.1);
  s.effective.Lambda = {0.1, 0.08, 0.1};
  s.axis1 = linspace_axis("Lambda[3]/Lambda[1]", 0.2, 1.2, 101);
  s.required = {
      {"kappa1", "(a): 0.1; (b): 10; (c): not printed (unresolved regime implied; reading: 10)"},
      {"chi_mag", "(a),(b): 0; (c): 5"},
  };
  return s;
}

SweepSpec preset_fig7() {
  SweepSpec s;
  s.preset_id = "fig7";
  s.effective = effective_base(4, 0.1, 0.2);
  s.effective.Lambda = {0.2, 0.16, 0.18, 0.2};
  s.axis1 = linspace_axis("Lambda[4]/Lambda[1]", 0.2, 1.2, 101);
  s.required = {
      {"kappa1", "(b): 10; (a),(c): not printed (reading: (a) 0.1 resolved, (c) 10)"},
      {"chi_mag", "(a),(b): 0; (c): not printed (reading: 5)"},
  };
  return s;
}

}  // namespace

std::vector<std::string> preset_ids() { return {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7"}; }

SweepSpec preset(const std::string& figure_id) {
  if (figure_id == "fig2") return preset_fig2();
  if (figure_id == "fig3") return preset_fig3();
  if (figure_id == "fig4") return preset_fig4();
  if (figure_id == "fig5") return preset_fig5();
  if (figure_id == "fig6") return preset_fig6();
  if (figure_id == "fig7") return preset_fig7();
  throw ValidationError("unknown preset '" + figure_id + "' (known: fig2..fig7)");
}

std::string preset_describe(const std::string& figure_id) {
  SweepSpec s = preset(figure_id);
  std::ostringstream out;
  out << s.preset_id << ": ";
  if (s.kind == SweepKind::MeanField) {
    out << "steady-state amplitude sweep over drive power\n";
    const PhysicalParams& p = s.physical;
    out << "  [physical] n_modes=" << p.n_modes << ", omega[j]=" << g17(p.omega[0])
        << " rad/s, kappa1=" << p.kappa1 / p.omega[0] << " w1, kappa2=" << p.kappa2 / p.omega[0]
        << " w1, g1[j]=g2[j]=" << p.g1[0] / p.omega[0] << " w1, eta[j]=" << p.eta[0] / p.omega[0]
        << " w1, chi0=" << p.chi0 / p.omega[0] << " w1, delta_c=" << p.delta_c / p.omega[0]
        << " w1, delta_c_prime=" << p.delta_c_prime / p.omega[0] << " w1\n";
    out << "  beta phases projected to zero when deriving effective parameters\n";
  } else {
    const EffectiveParams& p = s.effective;
    out << "phonon-occupation sweep (N=" << p.n_modes << ")\n";
    out << "  [effective] omega={";
    for (int j = 0; j < p.n_modes; ++j) out << (j ? "," : "") << p.omega[j];
    out << "}, gamma[j]=" << p.gamma[0] << ", G1[j]=" << p.G1[0] << ", Lambda={";
    for (int j = 0; j < p.n_modes; ++j) out << (j ? "," : "") << p.Lambda[j];
    out << "}, delta_c=" << p.delta_c << ", phi=" << p.phi << " rad, n_th=" << p.n_th << "\n";
  }
  out << "  axis1: " << s.axis1.path << " in [" << s.axis1.values.front() << ", "
      << s.axis1.values.back() << "], " << s.axis1.values.size() << " points\n";
  if (s.axis2)
    out << "  axis2: " << s.axis2->path << " in [" << s.axis2->values.front() << ", "
        << s.axis2->values.back() << "], " << s.axis2->values.size() << " points\n";
  if (!s.required.empty()) {
    out << "  required inputs (pass --set <path>=<value>):\n";
    for (const auto& r : s.required) out << "    " << r.path << " -- " << r.note << "\n";
  }
  return out.str();
}

void apply_set(SweepSpec& spec, const std::string& path, double value) {
  if (spec.kind == SweepKind::Cooling)
    set_path(spec.effective, path, value);
  else
    set_path(spec.physical, path, value);
  // clear required markers matching the path (or the numerator of a ratio)
  std::string num = path.substr(0, path.find('/'));
  spec.required.erase(std::remove_if(spec.required.begin(), spec.required.end(),
                                     [&](const RequiredInput& r) {
                                       return r.path == path || r.path == num;
                                     }),
                      spec.required.end());
}

void resize_axes(SweepSpec& spec, int count) {
  spec.axis1 = linspace_axis(spec.axis1.path, spec.axis1.values.front(),
                             spec.axis1.values.back(), count);
  if (spec.axis2)
    spec.axis2 = linspace_axis(spec.axis2->path, spec.axis2->values.front(),
                               spec.axis2->values.back(), count);
}

std::vector<RequiredInput> missing_inputs(const SweepSpec& spec) { return spec.required; }

// ---------------------------------------------------------------------------
// spec from config
// ---------------------------------------------------------------------------

namespace {

SweepAxis axis_from_string(const std::string& text, const std::string& which) {
  // "path : lo : hi : count"
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ':') {
      parts.push_back(cur);
      cur.clear();
    } else
      cur += c;
  }
  parts.push_back(cur);
  auto strip = [](std::string s) {
    size_t b = s.find_first_not_of(" \t");
    size_t e = s.find_last_not_of(" \t");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  };
  if (parts.size() != 4)
    throw ConfigError("[sweep] " + which + ": expected 'path : lo : hi : count'");
  try {
    return linspace_axis(strip(parts[0]), std::stod(strip(parts[1])), std::stod(strip(parts[2])),
                         std::stoi(strip(parts[3])));
  } catch (const ValidationError&) {
    throw;
  } catch (const std::exception&) {
    throw ConfigError("[sweep] " + which + ": malformed number in '" + text + "'");
  }
}

}  // namespace

SweepSpec spec_from_config(const ConfigFile& cfg) {
  SweepSpec spec;
  const bool has_eff = cfg.has_section("effective");
  const bool has_phys = cfg.has_section("physical");
  if (has_eff == has_phys)
    throw ConfigError("sweep config needs exactly one of [effective] or [physical]");
  if (has_eff) {
    spec.kind = SweepKind::Cooling;
    spec.effective = effective_from_config(cfg);
  } else {
    spec.kind = SweepKind::MeanField;
    spec.physical = physical_from_config(cfg);
    spec.mf_config = meanfield_config_from_config(cfg);
  }
  if (!cfg.has_section("sweep")) throw ConfigError("missing [sweep] section");
  bool have_axis1 = false;
  for (const auto& e : cfg.section("sweep")) {
    std::string key = e.key;
    for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (key == "axis1") {
      spec.axis1 = axis_from_string(e.value, "axis1");
      have_axis1 = true;
    } else if (key == "axis2") {
      spec.axis2 = axis_from_string(e.value, "axis2");
    } else if (key == "outputs") {
      std::vector<std::string> cols;
      std::string cur;
      for (char c : e.value + ",") {
        if (c == ',') {
          size_t b = cur.find_first_not_of(" \t");
          if (b != std::string::npos) {
            size_t en = cur.find_last_not_of(" \t");
            cols.push_back(cur.substr(b, en - b + 1));
          }
          cur.clear();
        } else
          cur += c;
      }
      spec.outputs = std::move(cols);
    } else if (key == "dark_scan") {
      spec.dark_scan = e.value != "0" && e.value != "false";
    } else if (key == "dark_threshold") {
      spec.dark_threshold = std::stod(e.value);
    } else if (key == "zero_beta_phase") {
      spec.zero_beta_phase = e.value != "0" && e.value != "false";
    } else {
      throw ConfigError("[sweep]: unknown key '" + e.key + "'");
    }
  }
  if (!have_axis1) throw ConfigError("[sweep]: missing axis1");
  return spec;
}

// ---------------------------------------------------------------------------
// run_sweep
// ---------------------------------------------------------------------------

namespace {

void check_monotone(const SweepAxis& axis) {
  if (axis.values.empty()) throw ValidationError("axis '" + axis.path + "': grid is empty");
  for (size_t i = 1; i < axis.values.size(); ++i) {
    bool up = axis.values[1] > axis.values[0];
    if (up ? !(axis.values[i] > axis.values[i - 1]) : !(axis.values[i] < axis.values[i - 1]))
      throw ValidationError("axis '" + axis.path + "': grid must be strictly monotone");
  }
}

std::vector<std::string> cooling_output_columns(const SweepSpec& spec) {
  const int n = spec.effective.n_modes;
  std::vector<std::string> canonical = {"stable", "max_re_eigenvalue"};
  for (int j = 1; j <= n; ++j) canonical.push_back("n_" + std::to_string(j));
  canonical.push_back("n_cavity");
  canonical.push_back("lyapunov_residual");
  if (spec.dark_scan) canonical.push_back("dark_pairs");
  if (!spec.outputs) return canonical;

  std::vector<std::string> cols;
  for (const std::string& tok : *spec.outputs) {
    if (tok == "n") {
      for (int j = 1; j <= n; ++j) cols.push_back("n_" + std::to_string(j));
      continue;
    }
    bool known = std::find(canonical.begin(), canonical.end(), tok) != canonical.end() ||
                 tok == "dark_pairs";
    if (!known) throw ValidationError("outputs: unknown column '" + tok + "'");
    cols.push_back(tok);
  }
  if (spec.dark_scan && std::find(cols.begin(), cols.end(), "dark_pairs") == cols.end())
    cols.push_back("dark_pairs");
  return cols;
}

std::vector<std::string> meanfield_columns(int n) {
  std::vector<std::string> cols = {"P_watt", "abs_alpha1", "abs_alpha2"};
  for (int j = 1; j <= n; ++j) cols.push_back("abs_beta_" + std::to_string(j));
  for (int j = 1; j <= n; ++j) cols.push_back("phase_beta_" + std::to_string(j));
  cols.push_back("converged");
  return cols;
}

SweepRow evaluate_cooling_point(const SweepSpec& spec, const std::vector<std::string>& columns,
                                int n_axis_cols, double v1, const double* v2) {
  SweepRow row;
  row.cells.assign(columns.size(), std::nullopt);
  row.cells[0] = v1;
  if (v2) row.cells[1] = *v2;
  try {
    EffectiveParams p = spec.effective;
    if (v2) set_path(p, spec.axis2->path, *v2);
    set_path(p, spec.axis1.path, v1);
    validate(p);
    CoolingResult cr = cooling_point(p);
    for (size_t c = static_cast<size_t>(n_axis_cols); c < columns.size(); ++c) {
      const std::string& name = columns[c];
      if (name == "stable")
        row.cells[c] = cr.stable ? 1.0 : 0.0;
      else if (name == "max_re_eigenvalue")
        row.cells[c] = cr.max_re_eigenvalue;
      else if (name == "n_cavity") {
        if (cr.stable) row.cells[c] = cr.n_cavity;
      } else if (name == "lyapunov_residual") {
        if (cr.stable) row.cells[c] = cr.lyapunov_residual;
      } else if (name.rfind("n_", 0) == 0 && name != "n_cavity") {
        int j = std::stoi(name.substr(2));
        if (cr.stable) row.cells[c] = cr.n[j - 1];
      }
    }
    if (spec.dark_scan) row.dark_pairs = join_pairs(pairwise_dark_scan(p, spec.dark_threshold));
    row.evaluated = true;
  } catch (const std::exception& e) {
    row.evaluated = false;
    row.error = e.what();
  }
  return row;
}

}  // namespace

SweepResult run_sweep(const SweepSpec& spec, int jobs, std::ostream* progress) {
  auto missing = missing_inputs(spec);
  if (!missing.empty()) {
    std::string msg = "sweep spec has unset required inputs:";
    for (const auto& r : missing) msg += " " + r.path + " (" + r.note + ");";
    throw ValidationError(msg);
  }
  check_monotone(spec.axis1);
  if (spec.axis2) check_monotone(*spec.axis2);
  if (jobs < 1) jobs = 1;

  SweepResult result;
  result.spec = spec;
  if (result.spec.kind == SweepKind::Cooling && result.spec.outputs) {
    // requesting the dark_pairs column implies the scan
    for (const auto& tok : *result.spec.outputs)
      if (tok == "dark_pairs") result.spec.dark_scan = true;
  }
  const SweepSpec& rspec = result.spec;

  if (spec.kind == SweepKind::MeanField) {
    if (spec.axis1.path != "P")
      throw ValidationError("mean-field sweeps support only the power axis 'P'");
    if (spec.axis2) throw ValidationError("mean-field sweeps are one-dimensional");
    if (spec.axis1.values.front() < 0.0)
      throw ValidationError("P: must be nonnegative");
    if (spec.axis1.values.back() < spec.axis1.values.front())
      throw ValidationError("P axis must ascend (solves are warm-started)");
    validate(spec.physical);
    result.columns = meanfield_columns(spec.physical.n_modes);
    auto rows = sweep_meanfield(spec.physical, spec.axis1.values, spec.mf_config);
    const int n = spec.physical.n_modes;
    for (const auto& mrow : rows) {
      SweepRow row;
      row.evaluated = true;
      row.cells.reserve(result.columns.size());
      row.cells.push_back(mrow.power);
      row.cells.push_back(std::abs(mrow.state.alpha1));
      row.cells.push_back(std::abs(mrow.state.alpha2));
      for (int j = 0; j < n; ++j) row.cells.push_back(std::abs(mrow.state.beta[j]));
      for (int j = 0; j < n; ++j) row.cells.push_back(std::arg(mrow.state.beta[j]));
      row.cells.push_back(mrow.state.converged ? 1.0 : 0.0);
      result.rows.push_back(std::move(row));
    }
    return result;
  }

  // Cooling sweep: check the axis paths resolve before spending any time
  {
    EffectiveParams scratch = spec.effective;
    set_path(scratch, spec.axis1.path, spec.axis1.values.front());
    if (spec.axis2) set_path(scratch, spec.axis2->path, spec.axis2->values.front());
  }

  result.columns.push_back(spec.axis1.path);
  const int n_axis_cols = spec.axis2 ? 2 : 1;
  if (spec.axis2) result.columns.push_back(spec.axis2->path);
  for (auto& c : cooling_output_columns(rspec)) result.columns.push_back(c);

  const size_t n1 = spec.axis1.values.size();
  const size_t n2 = spec.axis2 ? spec.axis2->values.size() : 1;
  const size_t total = n1 * n2;
  result.rows.resize(total);

  std::atomic<size_t> next{0};
  std::atomic<size_t> done{0};
  std::mutex progress_mutex;
  const size_t report_every = std::max<size_t>(1, total / 20);

  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= total) break;
      size_t i1 = i % n1;
      size_t i2 = i / n1;  // axis2-major ordering, axis1 fastest
      double v1 = spec.axis1.values[i1];
      double v2 = spec.axis2 ? spec.axis2->values[i2] : 0.0;
      result.rows[i] = evaluate_cooling_point(rspec, result.columns, n_axis_cols, v1,
                                              spec.axis2 ? &v2 : nullptr);
      size_t d = done.fetch_add(1) + 1;
      if (progress && (d % report_every == 0 || d == total)) {
        std::lock_guard<std::mutex> lock(progress_mutex);
        (*progress) << "sweep: " << d << "/" << total << " points\n";
      }
    }
  };

  if (jobs == 1 || total == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    int width = std::min<int>(jobs, static_cast<int>(total));
    pool.reserve(width);
    for (int t = 0; t < width; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return result;
}

// ---------------------------------------------------------------------------
// peaks
// ---------------------------------------------------------------------------

std::vector<double> find_peaks(const SweepResult& result, const std::string& column,
                               double prominence) {
  if (!(prominence > 0.0)) throw ValidationError("prominence: must be positive");
  if (result.spec.axis2) throw ValidationError("find_peaks: needs a one-dimensional sweep");
  auto it = std::find(result.columns.begin(), result.columns.end(), column);
  if (it == result.columns.end() || column == "dark_pairs")
    throw ValidationError("find_peaks: column '" + column + "' absent");
  const size_t ci = static_cast<size_t>(it - result.columns.begin());

  const size_t m = result.rows.size();
  std::vector<double> y(m);
  for (size_t i = 0; i < m; ++i) {
    const auto& cell = result.rows[i].cells[ci];
    if (!cell)
      throw ValidationError("find_peaks: column '" + column + "' has missing values (row " +
                            std::to_string(i) + ")");
    y[i] = *cell;
  }
  if (m < 3) return {};

  double ymin = *std::min_element(y.begin(), y.end());
  double ymax = *std::max_element(y.begin(), y.end());
  if (ymax == ymin) return {};
  const double threshold = prominence * (ymax - ymin);

  std::vector<double> out;
  size_t i = 0;
  while (i < m) {
    size_t j = i;
    while (j + 1 < m && y[j + 1] == y[i]) ++j;  // plateau [i, j]
    bool rises = i > 0 && y[i - 1] < y[i];
    bool falls = j + 1 < m && y[j + 1] < y[i];
    if (rises && falls) {
      const size_t peak = (i + j) / 2;
      const double yp = y[i];
      // topographic prominence: highest of the two key saddles
      double left_base = yp;
      for (size_t k = i; k-- > 0;) {
        if (y[k] > yp) break;
        left_base = std::min(left_base, y[k]);
      }
      double right_base = yp;
      for (size_t k = j + 1; k < m; ++k) {
        if (y[k] > yp) break;
        right_base = std::min(right_base, y[k]);
      }
      if (yp - std::max(left_base, right_base) >= threshold)
        out.push_back(result.spec.axis1.values[peak]);
    }
    i = j + 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// emission
// ---------------------------------------------------------------------------

namespace {

ordered_json effective_json(const EffectiveParams& p) {
  ordered_json j;
  j["n_modes"] = p.n_modes;
  j["omega"] = p.omega;
  j["gamma"] = p.gamma;
  j["kappa1"] = p.kappa1;
  j["delta_c"] = p.delta_c;
  j["G1"] = p.G1;
  j["Lambda"] = p.Lambda;
  j["chi_mag"] = p.chi_mag;
  j["phi"] = p.phi;
  j["n_th"] = p.n_th;
  if (!p.n_th_modes.empty()) j["n_th_modes"] = p.n_th_modes;
  return j;
}

EffectiveParams effective_from_json(const ordered_json& j) {
  EffectiveParams p;
  p.n_modes = j.at("n_modes").get<int>();
  p.omega = j.at("omega").get<std::vector<double>>();
  p.gamma = j.at("gamma").get<std::vector<double>>();
  p.kappa1 = j.at("kappa1").get<double>();
  p.delta_c = j.at("delta_c").get<double>();
  p.G1 = j.at("G1").get<std::vector<double>>();
  p.Lambda = j.at("Lambda").get<std::vector<double>>();
  p.chi_mag = j.at("chi_mag").get<double>();
  p.phi = j.at("phi").get<double>();
  p.n_th = j.at("n_th").get<double>();
  if (j.contains("n_th_modes")) p.n_th_modes = j.at("n_th_modes").get<std::vector<double>>();
  return p;
}

ordered_json physical_json(const PhysicalParams& p) {
  ordered_json j;
  j["n_modes"] = p.n_modes;
  j["omega_c"] = p.omega_c;
  j["omega_L"] = p.omega_L;
  j["omega"] = p.omega;
  j["gamma"] = p.gamma;
  j["kappa1"] = p.kappa1;
  j["kappa2"] = p.kappa2;
  j["g1"] = p.g1;
  j["g2"] = p.g2;
  j["eta"] = p.eta;
  j["chi0"] = p.chi0;
  j["P1"] = p.P1;
  j["P2"] = p.P2;
  j["delta_c"] = p.delta_c;
  j["delta_c_prime"] = p.delta_c_prime;
  j["hbar"] = p.hbar;
  return j;
}

PhysicalParams physical_from_json(const ordered_json& j) {
  PhysicalParams p;
  p.n_modes = j.at("n_modes").get<int>();
  p.omega_c = j.at("omega_c").get<double>();
  p.omega_L = j.at("omega_L").get<double>();
  p.omega = j.at("omega").get<std::vector<double>>();
  p.gamma = j.at("gamma").get<std::vector<double>>();
  p.kappa1 = j.at("kappa1").get<double>();
  p.kappa2 = j.at("kappa2").get<double>();
  p.g1 = j.at("g1").get<std::vector<double>>();
  p.g2 = j.at("g2").get<std::vector<double>>();
  p.eta = j.at("eta").get<std::vector<double>>();
  p.chi0 = j.at("chi0").get<double>();
  p.P1 = j.at("P1").get<double>();
  p.P2 = j.at("P2").get<double>();
  p.delta_c = j.at("delta_c").get<double>();
  p.delta_c_prime = j.at("delta_c_prime").get<double>();
  p.hbar = j.at("hbar").get<double>();
  return p;
}

ordered_json axis_json(const SweepAxis& axis) {
  ordered_json j;
  j["path"] = axis.path;
  j["values"] = axis.values;
  return j;
}

void emit_csv(const SweepResult& result, std::ostream& out) {
  // literal empty output selection: header row only
  const bool header_only =
      result.spec.outputs.has_value() && result.spec.outputs->empty() &&
      result.spec.kind == SweepKind::Cooling;
  for (size_t c = 0; c < result.columns.size(); ++c)
    out << (c ? "," : "") << result.columns[c];
  out << '\n';
  if (header_only) return;
  for (const auto& row : result.rows) {
    for (size_t c = 0; c < result.columns.size(); ++c) {
      if (c) out << ',';
      if (result.columns[c] == "dark_pairs") {
        out << row.dark_pairs;
      } else if (c < row.cells.size() && row.cells[c]) {
        out << g17(*row.cells[c]);
      }
    }
    out << '\n';
  }
}

void emit_json(const SweepResult& result, std::ostream& out) {
  const SweepSpec& spec = result.spec;
  ordered_json doc;
  ordered_json meta;
  meta["kind"] = spec.kind == SweepKind::Cooling ? "cooling" : "meanfield";
  meta["preset"] = spec.preset_id;
  meta["code_version"] = kVersion;
  meta["stability_margin"] = kStabilityMargin;
  meta["dark_scan"] = spec.dark_scan;
  meta["dark_threshold"] = spec.dark_threshold;
  meta["axis1"] = axis_json(spec.axis1);
  meta["axis2"] = spec.axis2 ? axis_json(*spec.axis2) : ordered_json(nullptr);
  if (spec.kind == SweepKind::Cooling) {
    meta["inputs"] = effective_json(spec.effective);
  } else {
    meta["inputs"] = physical_json(spec.physical);
    ordered_json mc;
    mc["tolerance"] = spec.mf_config.tolerance;
    mc["max_iterations"] = spec.mf_config.max_iterations;
    mc["max_newton_iterations"] = spec.mf_config.max_newton_iterations;
    mc["time_step_init"] = spec.mf_config.time_step_init;
    mc["blowup_norm"] = spec.mf_config.blowup_norm;
    mc["zero_beta_phase"] = spec.zero_beta_phase;
    meta["meanfield_config"] = mc;
  }
  doc["metadata"] = meta;
  doc["columns"] = result.columns;
  ordered_json rows = ordered_json::array();
  for (const auto& row : result.rows) {
    ordered_json r;
    for (size_t c = 0; c < result.columns.size(); ++c) {
      const std::string& name = result.columns[c];
      if (name == "dark_pairs")
        r[name] = row.dark_pairs;
      else if (c < row.cells.size() && row.cells[c])
        r[name] = *row.cells[c];
      else
        r[name] = nullptr;
    }
    if (!row.evaluated) r["error"] = row.error;
    rows.push_back(std::move(r));
  }
  doc["rows"] = std::move(rows);
  out << doc.dump(2) << '\n';
}

}  // namespace

void emit(const SweepResult& result, EmitFormat format, std::ostream& out) {
  if (format == EmitFormat::Csv)
    emit_csv(result, out);
  else
    emit_json(result, out);
}

void emit_to_file(const SweepResult& result, EmitFormat format, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  emit(result, format, out);
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

SweepResult load_sweep_result_json(std::istream& in) {
  ordered_json doc = ordered_json::parse(in);
  SweepResult result;
  const ordered_json& meta = doc.at("metadata");
  SweepSpec& spec = result.spec;
  spec.kind = meta.at("kind").get<std::string>() == "meanfield" ? SweepKind::MeanField
                                                                : SweepKind::Cooling;
  spec.preset_id = meta.at("preset").get<std::string>();
  spec.dark_scan = meta.at("dark_scan").get<bool>();
  spec.dark_threshold = meta.at("dark_threshold").get<double>();
  spec.axis1.path = meta.at("axis1").at("path").get<std::string>();
  spec.axis1.values = meta.at("axis1").at("values").get<std::vector<double>>();
  if (!meta.at("axis2").is_null()) {
    SweepAxis a2;
    a2.path = meta.at("axis2").at("path").get<std::string>();
    a2.values = meta.at("axis2").at("values").get<std::vector<double>>();
    spec.axis2 = std::move(a2);
  }
  if (spec.kind == SweepKind::Cooling) {
    spec.effective = effective_from_json(meta.at("inputs"));
  } else {
    spec.physical = physical_from_json(meta.at("inputs"));
    const ordered_json& mc = meta.at("meanfield_config");
    spec.mf_config.tolerance = mc.at("tolerance").get<double>();
    spec.mf_config.max_iterations = mc.at("max_iterations").get<int>();
    spec.mf_config.max_newton_iterations = mc.at("max_newton_iterations").get<int>();
    spec.mf_config.time_step_init = mc.at("time_step_init").get<double>();
    spec.mf_config.blowup_norm = mc.at("blowup_norm").get<double>();
    spec.zero_beta_phase = mc.at("zero_beta_phase").get<bool>();
  }
  result.columns = doc.at("columns").get<std::vector<std::string>>();
  // reconstruct the output selection (columns minus axis columns)
  {
    size_t n_axis = spec.kind == SweepKind::Cooling ? (spec.axis2 ? 2 : 1) : 0;
    if (spec.kind == SweepKind::Cooling) {
      std::vector<std::string> outs(result.columns.begin() + n_axis, result.columns.end());
      spec.outputs = std::move(outs);
    }
  }
  for (const ordered_json& r : doc.at("rows")) {
    SweepRow row;
    row.evaluated = !r.contains("error");
    if (!row.evaluated) row.error = r.at("error").get<std::string>();
    row.cells.reserve(result.columns.size());
    for (const std::string& name : result.columns) {
      if (name == "dark_pairs") {
        row.dark_pairs = r.at(name).get<std::string>();
        row.cells.push_back(std::nullopt);
      } else if (r.at(name).is_null()) {
        row.cells.push_back(std::nullopt);
      } else {
        row.cells.push_back(r.at(name).get<double>());
      }
    }
    result.rows.push_back(std::move(row));
  }
  return result;
}

// ---------------------------------------------------------------------------
// single-point records
// ---------------------------------------------------------------------------

std::string cooling_point_json(const EffectiveParams& p, const CoolingResult& result) {
  ordered_json doc;
  doc["inputs"] = effective_json(p);
  doc["stable"] = result.stable;
  doc["max_re_eigenvalue"] = result.max_re_eigenvalue;
  if (result.stable) {
    doc["n"] = result.n;
    doc["n_cavity"] = result.n_cavity;
    doc["lyapunov_residual"] = result.lyapunov_residual;
  } else {
    doc["n"] = nullptr;
    doc["n_cavity"] = nullptr;
    doc["lyapunov_residual"] = nullptr;
  }
  return doc.dump(2) + "\n";
}

std::string dark_scan_json(const EffectiveParams& p, double threshold) {
  ordered_json doc;
  doc["threshold"] = threshold;
  ordered_json pairs = ordered_json::array();
  ordered_json dark = ordered_json::array();
  for (const auto& pa : pairwise_hybrid_analysis(p, threshold)) {
    ordered_json pj;
    pj["modes"] = {pa.j + 1, pa.k + 1};
    pj["omega_1w"] = pa.analysis.omega_1w;
    pj["omega_2w"] = pa.analysis.omega_2w;
    pj["omega_1L"] = pa.analysis.omega_1L;
    pj["omega_2L"] = pa.analysis.omega_2L;
    pj["G_plus"] = pa.analysis.g_plus;
    pj["xi_w"] = pa.analysis.xi_w;
    pj["xi_L"] = pa.analysis.xi_L;
    pj["dark"] = pa.analysis.dark;
    pairs.push_back(std::move(pj));
    if (pa.analysis.dark) dark.push_back(ordered_json::array({pa.j + 1, pa.k + 1}));
  }
  doc["pairs"] = std::move(pairs);
  doc["dark_pairs"] = std::move(dark);
  return doc.dump(2) + "\n";
}

}  // namespace dmcool
