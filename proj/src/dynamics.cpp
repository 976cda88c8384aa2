#include "dmcool/dynamics.hpp"

#include <cmath>
#include <string>

namespace dmcool {

DenseMatrix build_drift(const EffectiveParams& p) {
  validate(p);
  const int dim = 2 * (p.n_modes + 1);
  DenseMatrix a(dim, dim);
  const double c = p.chi_mag * std::cos(2.0 * p.phi);
  const double s = p.chi_mag * std::sin(2.0 * p.phi);
  a(0, 0) = c - p.kappa1 / 2.0;
  a(0, 1) = s + p.delta_c;
  a(1, 0) = s - p.delta_c;
  a(1, 1) = -c - p.kappa1 / 2.0;
  for (int j = 0; j < p.n_modes; ++j) {
    const int r = 2 + 2 * j;
    a(r, r) = -p.gamma[j] / 2.0;
    a(r, r + 1) = p.omega[j];
    a(r + 1, r) = -p.omega[j] - 4.0 * p.Lambda[j];
    a(r + 1, r + 1) = -p.gamma[j] / 2.0;
    a(1, r) = 2.0 * p.G1[j];
    a(r + 1, 0) = 2.0 * p.G1[j];
  }
  return a;
}

DenseMatrix build_noise(const EffectiveParams& p) {
  validate(p);
  const int dim = 2 * (p.n_modes + 1);
  DenseMatrix d(dim, dim);
  d(0, 0) = p.kappa1 / 2.0;
  d(1, 1) = p.kappa1 / 2.0;
  for (int j = 0; j < p.n_modes; ++j) {
    const double entry = p.gamma[j] * (2.0 * p.bath_occupancy(j) + 1.0) / 2.0;
    d(2 + 2 * j, 2 + 2 * j) = entry;
    d(3 + 2 * j, 3 + 2 * j) = entry;
  }
  return d;
}

LinearModel build_model(const EffectiveParams& p) {
  LinearModel m;
  m.params = p;
  m.a = build_drift(p);
  m.d = build_noise(p);
  m.dim = m.a.rows();
  return m;
}

StabilityReport is_stable(const DenseMatrix& a, double margin) {
  if (a.rows() != a.cols()) throw ValidationError("is_stable: matrix must be square");
  StabilityReport r;
  r.max_re_eigenvalue = max_real_eigenvalue(a);
  r.stable = r.max_re_eigenvalue < -margin * a.frobenius_norm();
  return r;
}

std::vector<double> phonon_numbers(const DenseMatrix& v, int n_modes) {
  const int dim = 2 * (n_modes + 1);
  if (v.rows() != dim || v.cols() != dim)
    throw ValidationError("phonon_numbers: covariance dimension " + std::to_string(v.rows()) +
                          " does not match 2(N+1) = " + std::to_string(dim));
  std::vector<double> n(n_modes);
  for (int j = 0; j < n_modes; ++j)
    n[j] = (v(2 + 2 * j, 2 + 2 * j) + v(3 + 2 * j, 3 + 2 * j) - 1.0) / 2.0;
  return n;
}

CoolingResult cooling_point(const EffectiveParams& p) {
  LinearModel m = build_model(p);
  CoolingResult res;
  StabilityReport st = is_stable(m.a);
  res.max_re_eigenvalue = st.max_re_eigenvalue;
  res.stable = st.stable;
  if (!res.stable) return res;  // no steady covariance exists

  res.v = solve_lyapunov(m.a, m.d);
  res.n = phonon_numbers(res.v, p.n_modes);
  res.n_cavity = (res.v(0, 0) + res.v(1, 1) - 1.0) / 2.0;
  res.lyapunov_residual =
      lyapunov_residual_norm(m.a, res.v, m.d) / m.d.frobenius_norm();
  return res;
}

DenseMatrix thermal_covariance(const EffectiveParams& p) {
  validate(p);
  const int dim = 2 * (p.n_modes + 1);
  DenseMatrix v(dim, dim);
  v(0, 0) = 0.5;
  v(1, 1) = 0.5;
  for (int j = 0; j < p.n_modes; ++j) {
    const double entry = (2.0 * p.bath_occupancy(j) + 1.0) / 2.0;
    v(2 + 2 * j, 2 + 2 * j) = entry;
    v(3 + 2 * j, 3 + 2 * j) = entry;
  }
  return v;
}

CoolingTrajectory evolve_cooling(const EffectiveParams& p, const DenseMatrix& v0,
                                 const std::vector<double>& times, const OdeOptions& opts) {
  LinearModel m = build_model(p);
  if (v0.rows() != m.dim || v0.cols() != m.dim)
    throw ValidationError("evolve_cooling: V0 dimension mismatch");
  if (times.empty()) throw ValidationError("evolve_cooling: times must be nonempty");
  for (size_t i = 0; i < times.size(); ++i) {
    if (times[i] < 0.0) throw ValidationError("evolve_cooling: times must be nonnegative");
    if (i > 0 && times[i] < times[i - 1])
      throw ValidationError("evolve_cooling: times must be nondecreasing");
  }

  CoolingTrajectory traj;
  traj.times = times;
  DenseMatrix v = v0;
  double t = 0.0;
  for (double target : times) {
    if (target > t) {
      OdeResult step = integrate_matrix_ode(m.a, m.d, v, target - t, opts);
      v = std::move(step.v);
      t = target;
    }
    traj.v.push_back(v);
    traj.n.push_back(phonon_numbers(v, p.n_modes));
  }
  return traj;
}

}  // namespace dmcool
