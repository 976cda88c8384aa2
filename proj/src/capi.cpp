#include "dmcool/dmcool.h"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "dmcool/config.hpp"
#include "dmcool/darkmode.hpp"
#include "dmcool/dynamics.hpp"
#include "dmcool/meanfield.hpp"
#include "dmcool/model.hpp"
#include "dmcool/sweep.hpp"
#include "dmcool/version.hpp"

namespace {

thread_local std::string g_last_error;

dmcool_status set_error(dmcool_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Every API body runs through here so exceptions map uniformly onto codes.
template <typename Fn>
dmcool_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return DMCOOL_OK;
  } catch (const dmcool::UnstableSystemError& e) {
    return set_error(DMCOOL_ERROR_UNSTABLE, e.what());
  } catch (const dmcool::ValidationError& e) {
    return set_error(DMCOOL_ERROR_VALIDATION, e.what());
  } catch (const dmcool::ConfigError& e) {
    return set_error(DMCOOL_ERROR_VALIDATION, e.what());
  } catch (const dmcool::IoError& e) {
    return set_error(DMCOOL_ERROR_IO, e.what());
  } catch (const dmcool::NumericalError& e) {
    return set_error(DMCOOL_ERROR_NUMERICAL, e.what());
  } catch (const std::exception& e) {
    return set_error(DMCOOL_ERROR_NUMERICAL, e.what());
  }
}

dmcool_status bad_arg(const char* what) {
  return set_error(DMCOOL_ERROR_INVALID_ARGUMENT, what);
}

dmcool_status copy_to_buffer(const std::string& text, char* buf, size_t size) {
  if (!buf) return bad_arg("buffer is null");
  if (text.size() + 1 > size)
    return set_error(DMCOOL_ERROR_INVALID_ARGUMENT,
                     "buffer too small (need " + std::to_string(text.size() + 1) + " bytes)");
  std::memcpy(buf, text.c_str(), text.size() + 1);
  return DMCOOL_OK;
}

void write_text(const std::string& text, const char* path) {
  if (!path) {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dmcool::IoError(std::string("cannot open output file: ") + path);
  out << text;
  out.flush();
  if (!out) throw dmcool::IoError(std::string("write failed: ") + path);
}

}  // namespace

struct dmcool_physical {
  dmcool::PhysicalParams p;
};
struct dmcool_effective {
  dmcool::EffectiveParams p;
};
struct dmcool_meanfield {
  dmcool::MeanFieldState s;
};
struct dmcool_cooling {
  dmcool::CoolingResult r;
  int n_modes = 0;
};
struct dmcool_sweep_spec {
  dmcool::SweepSpec s;
};
struct dmcool_sweep_result {
  dmcool::SweepResult r;
};

extern "C" {

const char* dmcool_version(void) { return dmcool::kVersion; }

const char* dmcool_last_error(void) { return g_last_error.c_str(); }

/* ---------------- parameters ---------------- */

dmcool_status dmcool_physical_create(int n_modes, dmcool_physical** out) {
  if (!out) return bad_arg("out is null");
  return guarded([&] {
    if (n_modes < 1) throw dmcool::ValidationError("n_modes: must be at least 1");
    auto* h = new dmcool_physical;
    h->p.n_modes = n_modes;
    h->p.omega.assign(n_modes, 0.0);
    h->p.gamma.assign(n_modes, 0.0);
    h->p.g1.assign(n_modes, 0.0);
    h->p.g2.assign(n_modes, 0.0);
    h->p.eta.assign(n_modes, 0.0);
    *out = h;
  });
}

void dmcool_physical_destroy(dmcool_physical* p) { delete p; }

dmcool_status dmcool_physical_set(dmcool_physical* p, const char* path, double value) {
  if (!p || !path) return bad_arg("null argument");
  return guarded([&] { dmcool::set_path(p->p, path, value); });
}

dmcool_status dmcool_physical_get(const dmcool_physical* p, const char* path, double* out) {
  if (!p || !path || !out) return bad_arg("null argument");
  return guarded([&] { *out = dmcool::get_path(p->p, path); });
}

dmcool_status dmcool_physical_validate(const dmcool_physical* p) {
  if (!p) return bad_arg("handle is null");
  return guarded([&] { dmcool::validate(p->p); });
}

dmcool_status dmcool_physical_load(const char* file, dmcool_physical** out) {
  if (!file || !out) return bad_arg("null argument");
  return guarded([&] {
    auto cfg = dmcool::ConfigFile::parse_file(file);
    auto* h = new dmcool_physical;
    h->p = dmcool::physical_from_config(cfg);
    *out = h;
  });
}

dmcool_status dmcool_effective_create(int n_modes, dmcool_effective** out) {
  if (!out) return bad_arg("out is null");
  return guarded([&] {
    if (n_modes < 1) throw dmcool::ValidationError("n_modes: must be at least 1");
    auto* h = new dmcool_effective;
    h->p.n_modes = n_modes;
    h->p.omega.assign(n_modes, 0.0);
    h->p.gamma.assign(n_modes, 0.0);
    h->p.G1.assign(n_modes, 0.0);
    h->p.Lambda.assign(n_modes, 0.0);
    *out = h;
  });
}

void dmcool_effective_destroy(dmcool_effective* p) { delete p; }

dmcool_status dmcool_effective_set(dmcool_effective* p, const char* path, double value) {
  if (!p || !path) return bad_arg("null argument");
  return guarded([&] { dmcool::set_path(p->p, path, value); });
}

dmcool_status dmcool_effective_get(const dmcool_effective* p, const char* path, double* out) {
  if (!p || !path || !out) return bad_arg("null argument");
  return guarded([&] { *out = dmcool::get_path(p->p, path); });
}

dmcool_status dmcool_effective_validate(const dmcool_effective* p) {
  if (!p) return bad_arg("handle is null");
  return guarded([&] { dmcool::validate(p->p); });
}

dmcool_status dmcool_effective_load(const char* file, dmcool_effective** out) {
  if (!file || !out) return bad_arg("null argument");
  return guarded([&] {
    auto cfg = dmcool::ConfigFile::parse_file(file);
    auto* h = new dmcool_effective;
    h->p = dmcool::effective_from_config(cfg);
    *out = h;
  });
}

dmcool_status dmcool_effective_n_modes(const dmcool_effective* p, int* out) {
  if (!p || !out) return bad_arg("null argument");
  *out = p->p.n_modes;
  return DMCOOL_OK;
}

/* ---------------- mean field ---------------- */

void dmcool_meanfield_options_init(dmcool_meanfield_options* opts) {
  if (!opts) return;
  dmcool::MeanFieldSolverConfig defaults;
  opts->tolerance = defaults.tolerance;
  opts->max_iterations = defaults.max_iterations;
  opts->max_newton_iterations = defaults.max_newton_iterations;
  opts->time_step_init = defaults.time_step_init;
  opts->blowup_norm = defaults.blowup_norm;
  opts->strategy = 0;
}

namespace {

dmcool::MeanFieldSolverConfig to_config(const dmcool_meanfield_options* opts) {
  dmcool::MeanFieldSolverConfig cfg;
  if (!opts) return cfg;
  cfg.tolerance = opts->tolerance;
  cfg.max_iterations = opts->max_iterations;
  cfg.max_newton_iterations = opts->max_newton_iterations;
  cfg.time_step_init = opts->time_step_init;
  cfg.blowup_norm = opts->blowup_norm;
  switch (opts->strategy) {
    case 1:
      cfg.strategy = dmcool::MeanFieldStrategy::RelaxOnly;
      break;
    case 2:
      cfg.strategy = dmcool::MeanFieldStrategy::NewtonOnly;
      break;
    default:
      cfg.strategy = dmcool::MeanFieldStrategy::RelaxThenNewton;
  }
  return cfg;
}

}  // namespace

dmcool_status dmcool_meanfield_solve(const dmcool_physical* p,
                                     const dmcool_meanfield_options* opts,
                                     dmcool_meanfield** out) {
  if (!p || !out) return bad_arg("null argument");
  return guarded([&] {
    auto* h = new dmcool_meanfield;
    h->s = dmcool::solve_meanfield(p->p, to_config(opts));
    *out = h;
  });
}

void dmcool_meanfield_destroy(dmcool_meanfield* mf) { delete mf; }

dmcool_status dmcool_meanfield_alpha(const dmcool_meanfield* mf, int which, double* re,
                                     double* im) {
  if (!mf || !re || !im) return bad_arg("null argument");
  if (which != 1 && which != 2) return bad_arg("which must be 1 or 2");
  auto v = which == 1 ? mf->s.alpha1 : mf->s.alpha2;
  *re = v.real();
  *im = v.imag();
  return DMCOOL_OK;
}

dmcool_status dmcool_meanfield_beta(const dmcool_meanfield* mf, int mode, double* re, double* im) {
  if (!mf || !re || !im) return bad_arg("null argument");
  if (mode < 1 || mode > static_cast<int>(mf->s.beta.size())) return bad_arg("mode out of range");
  *re = mf->s.beta[mode - 1].real();
  *im = mf->s.beta[mode - 1].imag();
  return DMCOOL_OK;
}

dmcool_status dmcool_meanfield_residual(const dmcool_meanfield* mf, double* out) {
  if (!mf || !out) return bad_arg("null argument");
  *out = mf->s.residual_norm;
  return DMCOOL_OK;
}

dmcool_status dmcool_meanfield_iterations(const dmcool_meanfield* mf, long* out) {
  if (!mf || !out) return bad_arg("null argument");
  *out = mf->s.iterations;
  return DMCOOL_OK;
}

dmcool_status dmcool_meanfield_converged(const dmcool_meanfield* mf, int* out) {
  if (!mf || !out) return bad_arg("null argument");
  *out = mf->s.converged ? 1 : 0;
  return DMCOOL_OK;
}

dmcool_status dmcool_meanfield_diverged(const dmcool_meanfield* mf, int* out) {
  if (!mf || !out) return bad_arg("null argument");
  *out = mf->s.diverged ? 1 : 0;
  return DMCOOL_OK;
}

dmcool_status dmcool_meanfield_sweep_emit(const dmcool_physical* p, const double* powers,
                                          int n_powers, const dmcool_meanfield_options* opts,
                                          const char* format, const char* path) {
  if (!p || !powers || !format) return bad_arg("null argument");
  if (n_powers < 1) return bad_arg("n_powers must be at least 1");
  return guarded([&] {
    std::vector<double> pw(powers, powers + n_powers);
    auto rows = dmcool::sweep_meanfield(p->p, pw, to_config(opts));
    std::ostringstream text;
    std::string fmt = format;
    if (fmt == "csv")
      dmcool::write_meanfield_csv(rows, p->p.n_modes, text);
    else if (fmt == "json")
      dmcool::write_meanfield_json(rows, p->p.n_modes, text);
    else
      throw dmcool::ValidationError("format must be 'csv' or 'json'");
    write_text(text.str(), path);
  });
}

dmcool_status dmcool_effective_from_physical(const dmcool_physical* p, const dmcool_meanfield* mf,
                                             double n_th, int zero_beta_phase,
                                             dmcool_effective** out) {
  if (!p || !mf || !out) return bad_arg("null argument");
  return guarded([&] {
    auto* h = new dmcool_effective;
    h->p = dmcool::effective_from_physical(p->p, mf->s, n_th, zero_beta_phase != 0);
    *out = h;
  });
}

/* ---------------- cooling ---------------- */

dmcool_status dmcool_cooling_point(const dmcool_effective* p, dmcool_cooling** out) {
  if (!p || !out) return bad_arg("null argument");
  return guarded([&] {
    auto* h = new dmcool_cooling;
    h->r = dmcool::cooling_point(p->p);
    h->n_modes = p->p.n_modes;
    *out = h;
  });
}

void dmcool_cooling_destroy(dmcool_cooling* c) { delete c; }

dmcool_status dmcool_cooling_stable(const dmcool_cooling* c, int* out) {
  if (!c || !out) return bad_arg("null argument");
  *out = c->r.stable ? 1 : 0;
  return DMCOOL_OK;
}

dmcool_status dmcool_cooling_max_re_eigenvalue(const dmcool_cooling* c, double* out) {
  if (!c || !out) return bad_arg("null argument");
  *out = c->r.max_re_eigenvalue;
  return DMCOOL_OK;
}

dmcool_status dmcool_cooling_phonons(const dmcool_cooling* c, int mode, double* out) {
  if (!c || !out) return bad_arg("null argument");
  if (mode < 1 || mode > c->n_modes) return bad_arg("mode out of range");
  if (!c->r.stable)
    return set_error(DMCOOL_ERROR_UNSTABLE, "no steady state: drift matrix is unstable");
  *out = c->r.n[mode - 1];
  return DMCOOL_OK;
}

dmcool_status dmcool_cooling_n_cavity(const dmcool_cooling* c, double* out) {
  if (!c || !out) return bad_arg("null argument");
  if (!c->r.stable)
    return set_error(DMCOOL_ERROR_UNSTABLE, "no steady state: drift matrix is unstable");
  *out = c->r.n_cavity;
  return DMCOOL_OK;
}

dmcool_status dmcool_cooling_residual(const dmcool_cooling* c, double* out) {
  if (!c || !out) return bad_arg("null argument");
  if (!c->r.stable)
    return set_error(DMCOOL_ERROR_UNSTABLE, "no steady state: drift matrix is unstable");
  *out = c->r.lyapunov_residual;
  return DMCOOL_OK;
}

dmcool_status dmcool_cooling_dim(const dmcool_cooling* c, int* out) {
  if (!c || !out) return bad_arg("null argument");
  *out = 2 * (c->n_modes + 1);
  return DMCOOL_OK;
}

dmcool_status dmcool_cooling_covariance(const dmcool_cooling* c, double* buf, size_t len) {
  if (!c || !buf) return bad_arg("null argument");
  if (!c->r.stable)
    return set_error(DMCOOL_ERROR_UNSTABLE, "no steady state: drift matrix is unstable");
  const size_t need = c->r.v.data().size();
  if (len < need) return bad_arg("covariance buffer too small");
  std::memcpy(buf, c->r.v.data().data(), need * sizeof(double));
  return DMCOOL_OK;
}

dmcool_status dmcool_cooling_emit_json(const dmcool_effective* p, const dmcool_cooling* c,
                                       const char* path) {
  if (!p || !c) return bad_arg("null argument");
  return guarded([&] { write_text(dmcool::cooling_point_json(p->p, c->r), path); });
}

/* ---------------- dark mode ---------------- */

dmcool_status dmcool_hybrid_params(double omega1, double omega2, double lambda1, double lambda2,
                                   double g11, double g12, double threshold,
                                   dmcool_hybrid_analysis* out) {
  if (!out) return bad_arg("out is null");
  return guarded([&] {
    if (threshold <= 0.0) threshold = dmcool::kDarkThreshold;
    auto h = dmcool::hybrid_params(omega1, omega2, lambda1, lambda2, g11, g12, threshold);
    out->omega_1w = h.omega_1w;
    out->omega_2w = h.omega_2w;
    out->omega_1L = h.omega_1L;
    out->omega_2L = h.omega_2L;
    out->g_plus = h.g_plus;
    out->xi_w = h.xi_w;
    out->xi_L = h.xi_L;
    out->dark = h.dark ? 1 : 0;
  });
}

dmcool_status dmcool_dark_scan(const dmcool_effective* p, double threshold, int* pairs,
                               int capacity, int* count) {
  if (!p || !count) return bad_arg("null argument");
  return guarded([&] {
    if (threshold <= 0.0) threshold = dmcool::kDarkThreshold;
    auto dark = dmcool::pairwise_dark_scan(p->p, threshold);
    *count = static_cast<int>(dark.size());
    if (pairs) {
      if (capacity < static_cast<int>(dark.size()))
        throw dmcool::ValidationError("pairs buffer too small");
      for (size_t i = 0; i < dark.size(); ++i) {
        pairs[2 * i] = dark[i].j + 1;
        pairs[2 * i + 1] = dark[i].k + 1;
      }
    }
  });
}

dmcool_status dmcool_dark_scan_emit_json(const dmcool_effective* p, double threshold,
                                         const char* path) {
  if (!p) return bad_arg("handle is null");
  return guarded([&] {
    if (threshold <= 0.0) threshold = dmcool::kDarkThreshold;
    write_text(dmcool::dark_scan_json(p->p, threshold), path);
  });
}

/* ---------------- sweeps ---------------- */

dmcool_status dmcool_preset(const char* figure_id, dmcool_sweep_spec** out) {
  if (!figure_id || !out) return bad_arg("null argument");
  return guarded([&] {
    auto* h = new dmcool_sweep_spec;
    h->s = dmcool::preset(figure_id);
    *out = h;
  });
}

dmcool_status dmcool_preset_ids(char* buf, size_t size) {
  std::string text;
  for (const auto& id : dmcool::preset_ids()) {
    if (!text.empty()) text += '\n';
    text += id;
  }
  return copy_to_buffer(text, buf, size);
}

dmcool_status dmcool_preset_describe(const char* figure_id, char* buf, size_t size) {
  if (!figure_id) return bad_arg("figure_id is null");
  std::string text;
  dmcool_status rc = guarded([&] { text = dmcool::preset_describe(figure_id); });
  if (rc != DMCOOL_OK) return rc;
  return copy_to_buffer(text, buf, size);
}

dmcool_status dmcool_sweep_spec_load(const char* file, dmcool_sweep_spec** out) {
  if (!file || !out) return bad_arg("null argument");
  return guarded([&] {
    auto cfg = dmcool::ConfigFile::parse_file(file);
    auto* h = new dmcool_sweep_spec;
    h->s = dmcool::spec_from_config(cfg);
    *out = h;
  });
}

void dmcool_sweep_spec_destroy(dmcool_sweep_spec* spec) { delete spec; }

dmcool_status dmcool_sweep_spec_set(dmcool_sweep_spec* spec, const char* path, double value) {
  if (!spec || !path) return bad_arg("null argument");
  return guarded([&] { dmcool::apply_set(spec->s, path, value); });
}

dmcool_status dmcool_sweep_spec_set_axis(dmcool_sweep_spec* spec, int axis, const char* path,
                                         double lo, double hi, int count) {
  if (!spec || !path) return bad_arg("null argument");
  if (axis != 1 && axis != 2) return bad_arg("axis must be 1 or 2");
  return guarded([&] {
    auto a = dmcool::linspace_axis(path, lo, hi, count);
    if (axis == 1)
      spec->s.axis1 = std::move(a);
    else
      spec->s.axis2 = std::move(a);
  });
}

dmcool_status dmcool_sweep_spec_grid(dmcool_sweep_spec* spec, int count) {
  if (!spec) return bad_arg("handle is null");
  return guarded([&] { dmcool::resize_axes(spec->s, count); });
}

dmcool_status dmcool_sweep_spec_dark_scan(dmcool_sweep_spec* spec, int enabled, double threshold) {
  if (!spec) return bad_arg("handle is null");
  spec->s.dark_scan = enabled != 0;
  if (threshold > 0.0) spec->s.dark_threshold = threshold;
  return DMCOOL_OK;
}

dmcool_status dmcool_sweep_spec_missing(const dmcool_sweep_spec* spec, char* buf, size_t size,
                                        int* count) {
  if (!spec || !count) return bad_arg("null argument");
  auto missing = dmcool::missing_inputs(spec->s);
  *count = static_cast<int>(missing.size());
  std::string text;
  for (const auto& r : missing) {
    if (!text.empty()) text += '\n';
    text += r.path + " -- " + r.note;
  }
  if (!buf) return DMCOOL_OK;
  return copy_to_buffer(text, buf, size);
}

dmcool_status dmcool_sweep_run(const dmcool_sweep_spec* spec, int jobs, int progress,
                               dmcool_sweep_result** out) {
  if (!spec || !out) return bad_arg("null argument");
  return guarded([&] {
    auto* h = new dmcool_sweep_result;
    h->r = dmcool::run_sweep(spec->s, jobs, progress ? &std::cerr : nullptr);
    *out = h;
  });
}

void dmcool_sweep_result_destroy(dmcool_sweep_result* result) { delete result; }

dmcool_status dmcool_sweep_result_stats(const dmcool_sweep_result* result, int* n_rows,
                                        int* n_unstable, int* n_failed) {
  if (!result) return bad_arg("handle is null");
  int rows = static_cast<int>(result->r.rows.size());
  int unstable = 0, failed = 0;
  auto it = std::find(result->r.columns.begin(), result->r.columns.end(), "stable");
  const int stable_col =
      it == result->r.columns.end() ? -1 : static_cast<int>(it - result->r.columns.begin());
  for (const auto& row : result->r.rows) {
    if (!row.evaluated) {
      ++failed;
      continue;
    }
    if (stable_col >= 0 && row.cells[stable_col] && *row.cells[stable_col] == 0.0) ++unstable;
  }
  if (n_rows) *n_rows = rows;
  if (n_unstable) *n_unstable = unstable;
  if (n_failed) *n_failed = failed;
  return DMCOOL_OK;
}

dmcool_status dmcool_sweep_emit(const dmcool_sweep_result* result, const char* format,
                                const char* path) {
  if (!result || !format) return bad_arg("null argument");
  return guarded([&] {
    std::string fmt = format;
    dmcool::EmitFormat f;
    if (fmt == "csv")
      f = dmcool::EmitFormat::Csv;
    else if (fmt == "json")
      f = dmcool::EmitFormat::Json;
    else
      throw dmcool::ValidationError("format must be 'csv' or 'json'");
    if (path) {
      dmcool::emit_to_file(result->r, f, path);
    } else {
      dmcool::emit(result->r, f, std::cout);
      std::cout.flush();
    }
  });
}

dmcool_status dmcool_sweep_find_peaks(const dmcool_sweep_result* result, const char* column,
                                      double prominence, double* locations, int capacity,
                                      int* count) {
  if (!result || !column || !count) return bad_arg("null argument");
  return guarded([&] {
    auto peaks = dmcool::find_peaks(result->r, column, prominence);
    *count = static_cast<int>(peaks.size());
    if (locations) {
      if (capacity < static_cast<int>(peaks.size()))
        throw dmcool::ValidationError("locations buffer too small");
      for (size_t i = 0; i < peaks.size(); ++i) locations[i] = peaks[i];
    }
  });
}

}  // extern "C"
