#include "dmcool/model.hpp"

#include <cmath>
#include <string>

namespace dmcool {

namespace {

void require(bool ok, const std::string& msg) {
  if (!ok) throw ValidationError(msg);
}

void check_length(const std::vector<double>& v, int n, const char* field) {
  if (static_cast<int>(v.size()) != n)
    throw ValidationError(std::string(field) + ": expected " + std::to_string(n) +
                          " entries, got " + std::to_string(v.size()));
}

void check_positive(const std::vector<double>& v, const char* field) {
  for (size_t j = 0; j < v.size(); ++j)
    if (!(v[j] > 0.0))
      throw ValidationError(std::string(field) + "[" + std::to_string(j + 1) +
                            "]: must be positive");
}

}  // namespace

const PhysicalParams& validate(const PhysicalParams& p) {
  require(p.n_modes >= 1, "n_modes: must be at least 1");
  check_length(p.omega, p.n_modes, "omega");
  check_length(p.gamma, p.n_modes, "gamma");
  check_length(p.g1, p.n_modes, "g1");
  check_length(p.g2, p.n_modes, "g2");
  check_length(p.eta, p.n_modes, "eta");
  require(p.omega_c > 0.0, "omega_c: must be positive");
  require(p.omega_L > 0.0, "omega_L: must be positive");
  check_positive(p.omega, "omega");
  check_positive(p.gamma, "gamma");
  require(p.kappa1 > 0.0, "kappa1: must be positive");
  require(p.kappa2 > 0.0, "kappa2: must be positive");
  require(p.P1 >= 0.0, "P1: must be nonnegative");
  require(p.P2 >= 0.0, "P2: must be nonnegative");
  require(p.hbar > 0.0, "hbar: must be positive");
  return p;
}

const EffectiveParams& validate(const EffectiveParams& p) {
  require(p.n_modes >= 1, "n_modes: must be at least 1");
  check_length(p.omega, p.n_modes, "omega");
  check_length(p.gamma, p.n_modes, "gamma");
  check_length(p.G1, p.n_modes, "G1");
  check_length(p.Lambda, p.n_modes, "Lambda");
  check_positive(p.gamma, "gamma");
  require(p.kappa1 > 0.0, "kappa1: must be positive");
  require(p.n_th >= 0.0, "n_th: must be nonnegative");
  require(p.chi_mag >= 0.0, "chi_mag: must be nonnegative");
  for (size_t j = 0; j < p.Lambda.size(); ++j)
    require(p.Lambda[j] >= 0.0,
            "Lambda[" + std::to_string(j + 1) + "]: must be nonnegative");
  if (!p.n_th_modes.empty()) {
    check_length(p.n_th_modes, p.n_modes, "n_th_modes");
    for (size_t j = 0; j < p.n_th_modes.size(); ++j)
      require(p.n_th_modes[j] >= 0.0,
              "n_th_modes[" + std::to_string(j + 1) + "]: must be nonnegative");
  }
  return p;
}

double drive_amplitude(double power, double kappa, double omega_drive, double hbar) {
  require(power >= 0.0, "power: must be nonnegative");
  require(kappa > 0.0, "kappa: must be positive");
  require(omega_drive > 0.0, "omega_drive: must be positive");
  require(hbar > 0.0, "hbar: must be positive");
  return std::sqrt(2.0 * kappa * power / (hbar * omega_drive));
}

EffectiveParams effective_from_physical(const PhysicalParams& p, const MeanFieldState& mf,
                                        double n_th, bool zero_beta_phase) {
  validate(p);
  if (!mf.converged) throw ValidationError("mean field: state not converged");
  if (static_cast<int>(mf.beta.size()) != p.n_modes)
    throw ValidationError("mean field: beta length does not match n_modes");
  require(n_th >= 0.0, "n_th: must be nonnegative");

  const double w1 = p.omega[0];
  EffectiveParams e;
  e.n_modes = p.n_modes;
  e.omega.resize(p.n_modes);
  e.gamma.resize(p.n_modes);
  e.G1.resize(p.n_modes);
  e.Lambda.resize(p.n_modes);
  for (int j = 0; j < p.n_modes; ++j) {
    e.omega[j] = p.omega[j] / w1;
    e.gamma[j] = p.gamma[j] / w1;
    e.G1[j] = std::abs(p.g1[j] * mf.alpha1) / w1;
    double mod = std::abs(mf.beta[j]);
    double cosv = zero_beta_phase ? 1.0 : std::cos(std::arg(mf.beta[j]));
    e.Lambda[j] = 3.0 * p.eta[j] * (4.0 * mod * mod * cosv * cosv + 1.0) / w1;
  }
  e.kappa1 = p.kappa1 / w1;
  e.delta_c = p.delta_c / w1;
  std::complex<double> chi = p.chi0 * mf.alpha2;
  e.chi_mag = std::abs(chi) / w1;
  e.phi = (e.chi_mag > 0.0) ? 0.5 * std::arg(chi) : 0.0;
  e.n_th = n_th;
  return e;
}

}  // namespace dmcool
