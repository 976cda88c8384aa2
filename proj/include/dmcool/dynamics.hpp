#ifndef DMCOOL_DYNAMICS_HPP
#define DMCOOL_DYNAMICS_HPP

#include <vector>

#include "dmcool/model.hpp"
#include "dmcool/numkernel.hpp"

namespace dmcool {

// Drift and noise matrices of the linearized fluctuation dynamics, dimension
// 2(N+1) with quadrature ordering (X_a1, Y_a1, X_b1, Y_b1, ..., X_bN, Y_bN).
struct LinearModel {
  int dim = 0;
  DenseMatrix a;  // drift
  DenseMatrix d;  // diagonal noise
  EffectiveParams params;
};

struct CoolingResult {
  bool stable = false;
  double max_re_eigenvalue = 0.0;  // units of omega_1
  DenseMatrix v;                   // steady covariance; empty when unstable
  std::vector<double> n;           // per-mode phonon numbers; empty when unstable
  double n_cavity = 0.0;
  double lyapunov_residual = 0.0;  // ||A V + V A^T + D||_F / ||D||_F
};

// Drift matrix: cavity block
//   [ |chi| cos 2phi - kappa1/2   |chi| sin 2phi + delta_c ]
//   [ |chi| sin 2phi - delta_c   -|chi| cos 2phi - kappa1/2 ]
// mechanical block j
//   [ -gamma_j/2                omega_j   ]
//   [ -omega_j - 4 Lambda_j    -gamma_j/2 ]
// couplings 2 G1_j between the cavity Y row and X_bj, and the Y_bj row and
// X_a1.
DenseMatrix build_drift(const EffectiveParams& p);

// Noise matrix: diag(kappa1/2, kappa1/2, gamma_j (2 n_th + 1)/2 twice per
// mode).
DenseMatrix build_noise(const EffectiveParams& p);

LinearModel build_model(const EffectiveParams& p);

struct StabilityReport {
  bool stable = false;
  double max_re_eigenvalue = 0.0;
};

// Strictly stable means max Re(eig) < -margin * ||A||_F; an exactly zero
// real part is marginal, not stable.
StabilityReport is_stable(const DenseMatrix& a, double margin = kStabilityMargin);

// n_j = (V_{2j+1,2j+1} + V_{2j+2,2j+2} - 1)/2 with the 1-based indexing of
// the quadrature ordering above.
std::vector<double> phonon_numbers(const DenseMatrix& v, int n_modes);

// Full pipeline: build A and D, check stability, solve the steady-state
// covariance, extract per-mode phonon numbers and the cavity occupancy.
// Unstable points return the flag plus eigenvalue diagnostics and no
// covariance.
CoolingResult cooling_point(const EffectiveParams& p);

// Uncoupled thermal/vacuum covariance: cavity I/2, mechanical blocks
// (2 n_th + 1)/2 * I. Handy V0 for time evolution.
DenseMatrix thermal_covariance(const EffectiveParams& p);

struct CoolingTrajectory {
  std::vector<double> times;
  std::vector<DenseMatrix> v;
  std::vector<std::vector<double>> n;  // per-mode occupations at each sample
};

// Covariance evolution sampled at the requested times (nondecreasing, >= 0).
// Instability is permitted; the trajectory may then diverge.
CoolingTrajectory evolve_cooling(const EffectiveParams& p, const DenseMatrix& v0,
                                 const std::vector<double>& times, const OdeOptions& opts = {});

}  // namespace dmcool

#endif
