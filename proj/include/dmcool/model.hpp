#ifndef DMCOOL_MODEL_HPP
#define DMCOOL_MODEL_HPP

#include <complex>
#include <vector>

#include "dmcool/errors.hpp"

namespace dmcool {

// Laboratory-level inputs in SI units: frequencies and rates in rad/s,
// powers in watts. Arrays are indexed by mechanical mode (length n_modes).
struct PhysicalParams {
  int n_modes = 0;
  double omega_c = 0.0;  // fundamental cavity frequency
  double omega_L = 0.0;  // drive laser frequency
  std::vector<double> omega;  // mechanical frequencies
  std::vector<double> gamma;  // mechanical decay rates
  double kappa1 = 0.0, kappa2 = 0.0;  // optical decay rates
  std::vector<double> g1, g2;  // bare optomechanical couplings
  std::vector<double> eta;     // Duffing amplitudes
  double chi0 = 0.0;           // second-order medium strength
  double P1 = 0.0, P2 = 0.0;   // drive powers, W
  double delta_c = 0.0, delta_c_prime = 0.0;  // effective detunings (direct inputs)
  double hbar = 1.054571817e-34;              // J s
};

// Linearized-model inputs, all frequency-like values in units of the first
// mechanical frequency.
struct EffectiveParams {
  int n_modes = 0;
  std::vector<double> omega;   // mechanical frequencies
  std::vector<double> gamma;   // mechanical decay rates
  double kappa1 = 0.0;
  double delta_c = 0.0;
  std::vector<double> G1;      // linearized couplings, nonnegative magnitudes
  std::vector<double> Lambda;  // effective Duffing strengths
  double chi_mag = 0.0;        // |chi|
  double phi = 0.0;            // squeezing phase, rad
  double n_th = 0.0;           // thermal occupation shared by all baths
  std::vector<double> n_th_modes;  // optional per-mode override (empty -> n_th)

  double bath_occupancy(int j) const {
    return n_th_modes.empty() ? n_th : n_th_modes[static_cast<size_t>(j)];
  }
};

// Classical steady-state amplitudes with convergence metadata.
struct MeanFieldState {
  std::complex<double> alpha1{0.0, 0.0};
  std::complex<double> alpha2{0.0, 0.0};
  std::vector<std::complex<double>> beta;
  double residual_norm = 0.0;  // ||rhs|| / max(eps1, eps2, 1), in omega_1 units
  long iterations = 0;
  bool converged = false;
  bool diverged = false;
};

// Throw ValidationError naming the offending field when an invariant is
// violated; otherwise return the input unchanged.
const PhysicalParams& validate(const PhysicalParams& p);
const EffectiveParams& validate(const EffectiveParams& p);

// Drive amplitude eps = sqrt(2 kappa P / (hbar omega_drive)). The hbar
// divisor restores SI units for powers quoted in watts.
double drive_amplitude(double power, double kappa, double omega_drive, double hbar);

// Convert physical parameters plus a converged mean field into the
// linearized-model parameters, expressed in units of omega[0]:
//   Lambda_j = 3 eta_j (4 |beta_j|^2 cos^2(phase) + 1)
//   G1_j     = |g1_j alpha1|
//   chi      = chi0 alpha2,  chi_mag = |chi|,  phi = arg(chi)/2
// delta_c is copied from the physical inputs. n_th is supplied by the caller
// (no bath occupancy lives in PhysicalParams). zero_beta_phase projects the
// beta phases to zero when computing Lambda.
EffectiveParams effective_from_physical(const PhysicalParams& p, const MeanFieldState& mf,
                                        double n_th = 0.0, bool zero_beta_phase = false);

}  // namespace dmcool

#endif
