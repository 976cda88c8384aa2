#ifndef DMCOOL_MEANFIELD_HPP
#define DMCOOL_MEANFIELD_HPP

#include <iosfwd>
#include <vector>

#include "dmcool/model.hpp"

namespace dmcool {

enum class MeanFieldStrategy {
  RelaxThenNewton,  // damped time integration to near-stationarity, then Newton
  RelaxOnly,
  NewtonOnly,
};

struct MeanFieldSolverConfig {
  double tolerance = 1e-10;     // residual bound, relative to drive scale
  int max_iterations = 50000;   // relaxation iterations
  int max_newton_iterations = 60;
  double time_step_init = 0.05;  // units of 1/omega_1
  double blowup_norm = 1e12;     // divergence detector
  MeanFieldStrategy strategy = MeanFieldStrategy::RelaxThenNewton;
};

// Time derivatives (alpha1_dot, alpha2_dot, beta_j_dot) of the classical
// amplitude equations, evaluated in the units of p (SI rad/s for SI inputs).
std::vector<std::complex<double>> meanfield_rhs(const MeanFieldState& state,
                                                const PhysicalParams& p);

// Steady state of the classical amplitude equations. Non-convergence returns
// the best state with converged = false; amplitude blow-up past
// cfg.blowup_norm additionally sets diverged (unstable classical fixed
// point). A warm start seeds the iteration (otherwise the zero state).
MeanFieldState solve_meanfield(const PhysicalParams& p, const MeanFieldSolverConfig& cfg = {},
                               const MeanFieldState* warm_start = nullptr);

struct MeanFieldSweepRow {
  double power = 0.0;  // W, applied to both drives
  MeanFieldState state;
};

// One solve per power (ascending), warm-starting each from the previous
// fixed point. Per-point non-convergence is recorded in the row, never
// thrown.
std::vector<MeanFieldSweepRow> sweep_meanfield(const PhysicalParams& p,
                                               const std::vector<double>& powers,
                                               const MeanFieldSolverConfig& cfg = {});

// CSV columns: P_watt, abs_alpha1, abs_alpha2, abs_beta_1..N,
// phase_beta_1..N, converged. Full float precision, byte-stable.
void write_meanfield_csv(const std::vector<MeanFieldSweepRow>& rows, int n_modes,
                         std::ostream& out);
void write_meanfield_json(const std::vector<MeanFieldSweepRow>& rows, int n_modes,
                          std::ostream& out);

}  // namespace dmcool

#endif
