/* dmcool C API: steady-state cooling simulator for N mechanical modes
 * coupled to a nonlinear optical cavity.
 *
 * All objects are opaque handles created and destroyed through this API;
 * every fallible call returns a dmcool_status, and dmcool_last_error()
 * yields a thread-local message for the most recent failure.
 *
 * Unit conventions match the library: effective parameters are expressed in
 * units of the first mechanical frequency, physical parameters in SI
 * (rad/s, W). Mode and array indices are 1-based in parameter paths
 * ("omega[2]", "Lambda[3]/Lambda[1]") and in mode-pair output.
 */
#ifndef DMCOOL_H
#define DMCOOL_H

#include <stddef.h>

#if defined(_WIN32)
#ifdef DMCOOL_BUILD_SHARED
#define DMCOOL_API __declspec(dllexport)
#else
#define DMCOOL_API __declspec(dllimport)
#endif
#else
#define DMCOOL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dmcool_status {
  DMCOOL_OK = 0,
  DMCOOL_ERROR_INVALID_ARGUMENT = 1, /* bad handle, null pointer, small buffer */
  DMCOOL_ERROR_VALIDATION = 2,       /* parameter invariant or config violated */
  DMCOOL_ERROR_UNSTABLE = 3,         /* steady state requested for unstable drift */
  DMCOOL_ERROR_NUMERICAL = 4,        /* kernel failure (singular, no convergence) */
  DMCOOL_ERROR_IO = 5
} dmcool_status;

DMCOOL_API const char* dmcool_version(void);

/* Message for the most recent failure on this thread ("" if none). */
DMCOOL_API const char* dmcool_last_error(void);

/* ------------------------------------------------------------------ */
/* parameter sets                                                      */
/* ------------------------------------------------------------------ */

typedef struct dmcool_physical dmcool_physical;   /* SI laboratory inputs */
typedef struct dmcool_effective dmcool_effective; /* linearized-model inputs */

DMCOOL_API dmcool_status dmcool_physical_create(int n_modes, dmcool_physical** out);
DMCOOL_API void dmcool_physical_destroy(dmcool_physical* p);
DMCOOL_API dmcool_status dmcool_physical_set(dmcool_physical* p, const char* path, double value);
DMCOOL_API dmcool_status dmcool_physical_get(const dmcool_physical* p, const char* path,
                                             double* out);
DMCOOL_API dmcool_status dmcool_physical_validate(const dmcool_physical* p);
/* Parameter file with a [physical] section (see docs/CONFIG.md). */
DMCOOL_API dmcool_status dmcool_physical_load(const char* file, dmcool_physical** out);

DMCOOL_API dmcool_status dmcool_effective_create(int n_modes, dmcool_effective** out);
DMCOOL_API void dmcool_effective_destroy(dmcool_effective* p);
DMCOOL_API dmcool_status dmcool_effective_set(dmcool_effective* p, const char* path, double value);
DMCOOL_API dmcool_status dmcool_effective_get(const dmcool_effective* p, const char* path,
                                              double* out);
DMCOOL_API dmcool_status dmcool_effective_validate(const dmcool_effective* p);
DMCOOL_API dmcool_status dmcool_effective_load(const char* file, dmcool_effective** out);
DMCOOL_API dmcool_status dmcool_effective_n_modes(const dmcool_effective* p, int* out);

/* ------------------------------------------------------------------ */
/* classical mean field                                                */
/* ------------------------------------------------------------------ */

typedef struct dmcool_meanfield_options {
  double tolerance;       /* residual bound relative to drive scale */
  int max_iterations;     /* relaxation iterations */
  int max_newton_iterations;
  double time_step_init;  /* units of 1/omega_1 */
  double blowup_norm;     /* divergence detector */
  int strategy;           /* 0 relax+newton, 1 relax only, 2 newton only */
} dmcool_meanfield_options;

DMCOOL_API void dmcool_meanfield_options_init(dmcool_meanfield_options* opts);

typedef struct dmcool_meanfield dmcool_meanfield;

DMCOOL_API dmcool_status dmcool_meanfield_solve(const dmcool_physical* p,
                                                const dmcool_meanfield_options* opts,
                                                dmcool_meanfield** out);
DMCOOL_API void dmcool_meanfield_destroy(dmcool_meanfield* mf);
/* which = 1 or 2 selects the cavity amplitude. */
DMCOOL_API dmcool_status dmcool_meanfield_alpha(const dmcool_meanfield* mf, int which, double* re,
                                                double* im);
/* mode = 1..N. */
DMCOOL_API dmcool_status dmcool_meanfield_beta(const dmcool_meanfield* mf, int mode, double* re,
                                               double* im);
DMCOOL_API dmcool_status dmcool_meanfield_residual(const dmcool_meanfield* mf, double* out);
DMCOOL_API dmcool_status dmcool_meanfield_iterations(const dmcool_meanfield* mf, long* out);
DMCOOL_API dmcool_status dmcool_meanfield_converged(const dmcool_meanfield* mf, int* out);
DMCOOL_API dmcool_status dmcool_meanfield_diverged(const dmcool_meanfield* mf, int* out);

/* Sweep over ascending drive powers (P1 = P2 = P), warm-started; writes CSV
 * (columns P_watt, abs_alpha1, abs_alpha2, abs_beta_j, phase_beta_j,
 * converged) or JSON to path, or stdout when path is NULL. format is "csv"
 * or "json". */
DMCOOL_API dmcool_status dmcool_meanfield_sweep_emit(const dmcool_physical* p,
                                                     const double* powers, int n_powers,
                                                     const dmcool_meanfield_options* opts,
                                                     const char* format, const char* path);

/* Effective parameters from a converged mean field; n_th is the bath
 * occupation, zero_beta_phase projects the beta phases to zero when
 * computing the Duffing shifts. */
DMCOOL_API dmcool_status dmcool_effective_from_physical(const dmcool_physical* p,
                                                        const dmcool_meanfield* mf, double n_th,
                                                        int zero_beta_phase,
                                                        dmcool_effective** out);

/* ------------------------------------------------------------------ */
/* steady-state cooling                                                */
/* ------------------------------------------------------------------ */

typedef struct dmcool_cooling dmcool_cooling;

/* Never fails on an unstable point: the result carries the flag. */
DMCOOL_API dmcool_status dmcool_cooling_point(const dmcool_effective* p, dmcool_cooling** out);
DMCOOL_API void dmcool_cooling_destroy(dmcool_cooling* c);
DMCOOL_API dmcool_status dmcool_cooling_stable(const dmcool_cooling* c, int* out);
DMCOOL_API dmcool_status dmcool_cooling_max_re_eigenvalue(const dmcool_cooling* c, double* out);
/* mode = 1..N; DMCOOL_ERROR_UNSTABLE when no steady state exists. */
DMCOOL_API dmcool_status dmcool_cooling_phonons(const dmcool_cooling* c, int mode, double* out);
DMCOOL_API dmcool_status dmcool_cooling_n_cavity(const dmcool_cooling* c, double* out);
DMCOOL_API dmcool_status dmcool_cooling_residual(const dmcool_cooling* c, double* out);
DMCOOL_API dmcool_status dmcool_cooling_dim(const dmcool_cooling* c, int* out);
/* Row-major steady covariance, buffer of dim*dim doubles. */
DMCOOL_API dmcool_status dmcool_cooling_covariance(const dmcool_cooling* c, double* buf,
                                                   size_t len);
/* JSON record (inputs echo, stable, max_re_eigenvalue, n[], n_cavity,
 * residual) to path or stdout when NULL. */
DMCOOL_API dmcool_status dmcool_cooling_emit_json(const dmcool_effective* p,
                                                  const dmcool_cooling* c, const char* path);

/* ------------------------------------------------------------------ */
/* dark-mode diagnostics                                               */
/* ------------------------------------------------------------------ */

typedef struct dmcool_hybrid_analysis {
  double omega_1w, omega_2w; /* hybrid frequencies */
  double omega_1L, omega_2L; /* hybrid nonlinear shifts */
  double g_plus;             /* bright-mode coupling */
  double xi_w, xi_L;         /* mismatch couplings */
  int dark;
} dmcool_hybrid_analysis;

DMCOOL_API dmcool_status dmcool_hybrid_params(double omega1, double omega2, double lambda1,
                                              double lambda2, double g11, double g12,
                                              double threshold, dmcool_hybrid_analysis* out);

/* Dark mode pairs (1-based indices, two ints per pair) for every unordered
 * mode pair whose mismatch couplings both fall below threshold (pass
 * threshold <= 0 for the default). */
DMCOOL_API dmcool_status dmcool_dark_scan(const dmcool_effective* p, double threshold,
                                          int* pairs, int capacity, int* count);
DMCOOL_API dmcool_status dmcool_dark_scan_emit_json(const dmcool_effective* p, double threshold,
                                                    const char* path);

/* ------------------------------------------------------------------ */
/* parameter sweeps                                                    */
/* ------------------------------------------------------------------ */

typedef struct dmcool_sweep_spec dmcool_sweep_spec;
typedef struct dmcool_sweep_result dmcool_sweep_result;

/* Bundled presets: fig2..fig7. */
DMCOOL_API dmcool_status dmcool_preset(const char* figure_id, dmcool_sweep_spec** out);
/* Newline-joined preset ids. */
DMCOOL_API dmcool_status dmcool_preset_ids(char* buf, size_t size);
DMCOOL_API dmcool_status dmcool_preset_describe(const char* figure_id, char* buf, size_t size);

/* Config file with [sweep] plus [effective] or [physical]. */
DMCOOL_API dmcool_status dmcool_sweep_spec_load(const char* file, dmcool_sweep_spec** out);
DMCOOL_API void dmcool_sweep_spec_destroy(dmcool_sweep_spec* spec);
DMCOOL_API dmcool_status dmcool_sweep_spec_set(dmcool_sweep_spec* spec, const char* path,
                                               double value);
DMCOOL_API dmcool_status dmcool_sweep_spec_set_axis(dmcool_sweep_spec* spec, int axis,
                                                    const char* path, double lo, double hi,
                                                    int count);
/* Re-sample every axis to `count` points over its existing range. */
DMCOOL_API dmcool_status dmcool_sweep_spec_grid(dmcool_sweep_spec* spec, int count);
DMCOOL_API dmcool_status dmcool_sweep_spec_dark_scan(dmcool_sweep_spec* spec, int enabled,
                                                     double threshold);
/* Required-but-unset inputs, newline-joined "path -- note" lines; *count
 * receives the number of missing inputs. */
DMCOOL_API dmcool_status dmcool_sweep_spec_missing(const dmcool_sweep_spec* spec, char* buf,
                                                   size_t size, int* count);

/* Evaluates every grid point on `jobs` workers; per-point failures are
 * recorded in rows, never returned as an error. progress != 0 reports to
 * stderr. */
DMCOOL_API dmcool_status dmcool_sweep_run(const dmcool_sweep_spec* spec, int jobs, int progress,
                                          dmcool_sweep_result** out);
DMCOOL_API void dmcool_sweep_result_destroy(dmcool_sweep_result* result);
DMCOOL_API dmcool_status dmcool_sweep_result_stats(const dmcool_sweep_result* result,
                                                   int* n_rows, int* n_unstable, int* n_failed);
/* format "csv" or "json"; path NULL -> stdout. */
DMCOOL_API dmcool_status dmcool_sweep_emit(const dmcool_sweep_result* result, const char* format,
                                           const char* path);
/* Axis locations of prominent local maxima of a 1D sweep column. */
DMCOOL_API dmcool_status dmcool_sweep_find_peaks(const dmcool_sweep_result* result,
                                                 const char* column, double prominence,
                                                 double* locations, int capacity, int* count);

#ifdef __cplusplus
}
#endif

#endif /* DMCOOL_H */
