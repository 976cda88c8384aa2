#include "dmcool/meanfield.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <limits>
#include <ostream>

#include "dmcool/numkernel.hpp"
#include "json.hpp"

namespace dmcool {

namespace {

using cplx = std::complex<double>;

// Parameters rescaled to units of omega_1; drives are evaluated once.
struct ScaledSystem {
  int n = 0;
  double delta_c = 0.0, kappa1 = 0.0;
  double delta_c_prime = 0.0, kappa2 = 0.0;
  std::vector<double> omega, gamma, g1, g2, eta;
  double chi0 = 0.0;
  double eps1 = 0.0, eps2 = 0.0;

  explicit ScaledSystem(const PhysicalParams& p) {
    const double w1 = p.omega[0];
    n = p.n_modes;
    delta_c = p.delta_c / w1;
    kappa1 = p.kappa1 / w1;
    delta_c_prime = p.delta_c_prime / w1;
    kappa2 = p.kappa2 / w1;
    omega.resize(n);
    gamma.resize(n);
    g1.resize(n);
    g2.resize(n);
    eta.resize(n);
    for (int j = 0; j < n; ++j) {
      omega[j] = p.omega[j] / w1;
      gamma[j] = p.gamma[j] / w1;
      g1[j] = p.g1[j] / w1;
      g2[j] = p.g2[j] / w1;
      eta[j] = p.eta[j] / w1;
    }
    chi0 = p.chi0 / w1;
    eps1 = drive_amplitude(p.P1, p.kappa1, p.omega_L, p.hbar) / w1;
    eps2 = drive_amplitude(p.P2, p.kappa2, 2.0 * p.omega_L, p.hbar) / w1;
  }

  double drive_scale() const { return std::max({eps1, eps2, 1.0}); }
};

struct State {
  cplx a1{0.0, 0.0}, a2{0.0, 0.0};
  std::vector<cplx> b;
};

std::vector<cplx> rhs(const ScaledSystem& s, const State& x) {
  std::vector<cplx> f(2 + s.n);
  f[0] = -(cplx(0.0, s.delta_c) + s.kappa1 / 2.0) * x.a1 + s.chi0 * std::conj(x.a1) * x.a2 + s.eps1;
  f[1] = -(cplx(0.0, s.delta_c_prime) + s.kappa2 / 2.0) * x.a2 - 0.5 * s.chi0 * x.a1 * x.a1 + s.eps2;
  const double na1 = std::norm(x.a1);
  const double na2 = std::norm(x.a2);
  for (int j = 0; j < s.n; ++j) {
    // |beta| cos(phase) is just Re(beta); the Duffing term stays smooth at 0
    const double u = x.b[j].real();
    f[2 + j] = -(cplx(0.0, s.omega[j]) + s.gamma[j] / 2.0) * x.b[j] +
               cplx(0.0, s.g1[j] * na1 + s.g2[j] * na2) -
               cplx(0.0, s.eta[j] * (16.0 * u * u * u + 12.0 * u));
  }
  return f;
}

double rhs_norm(const std::vector<cplx>& f) {
  double s = 0.0;
  for (const cplx& v : f) s += std::norm(v);
  return std::sqrt(s);
}

double state_norm(const State& x) {
  double s = std::norm(x.a1) + std::norm(x.a2);
  for (const cplx& v : x.b) s += std::norm(v);
  return std::sqrt(s);
}

// One linearly-implicit Euler step: the stiff linear drift is treated
// implicitly, everything else explicitly. The fixed points coincide with the
// rhs zeros for every step size, so growing h relaxes straight onto them.
State implicit_euler_step(const ScaledSystem& s, const State& x, double h) {
  State out;
  out.b.resize(s.n);
  const double na1 = std::norm(x.a1);
  const double na2 = std::norm(x.a2);
  out.a1 = (x.a1 + h * (s.chi0 * std::conj(x.a1) * x.a2 + s.eps1)) /
           (1.0 + h * (cplx(0.0, s.delta_c) + s.kappa1 / 2.0));
  out.a2 = (x.a2 + h * (-0.5 * s.chi0 * x.a1 * x.a1 + s.eps2)) /
           (1.0 + h * (cplx(0.0, s.delta_c_prime) + s.kappa2 / 2.0));
  for (int j = 0; j < s.n; ++j) {
    const double u = x.b[j].real();
    cplx nonlin = cplx(0.0, s.g1[j] * na1 + s.g2[j] * na2) -
                  cplx(0.0, s.eta[j] * (16.0 * u * u * u + 12.0 * u));
    out.b[j] = (x.b[j] + h * nonlin) / (1.0 + h * (cplx(0.0, s.omega[j]) + s.gamma[j] / 2.0));
  }
  return out;
}

// Real/imaginary split of the algebraic system for Newton refinement.
void pack(const State& x, std::vector<double>& v) {
  v.resize(2 * (2 + x.b.size()));
  v[0] = x.a1.real();
  v[1] = x.a1.imag();
  v[2] = x.a2.real();
  v[3] = x.a2.imag();
  for (size_t j = 0; j < x.b.size(); ++j) {
    v[4 + 2 * j] = x.b[j].real();
    v[5 + 2 * j] = x.b[j].imag();
  }
}

State unpack(const std::vector<double>& v, int n) {
  State x;
  x.a1 = {v[0], v[1]};
  x.a2 = {v[2], v[3]};
  x.b.resize(n);
  for (int j = 0; j < n; ++j) x.b[j] = {v[4 + 2 * j], v[5 + 2 * j]};
  return x;
}

std::vector<double> residual_vector(const ScaledSystem& s, const State& x) {
  auto f = rhs(s, x);
  std::vector<double> r(2 * f.size());
  for (size_t i = 0; i < f.size(); ++i) {
    r[2 * i] = f[i].real();
    r[2 * i + 1] = f[i].imag();
  }
  return r;
}

DenseMatrix jacobian(const ScaledSystem& s, const State& x) {
  const int dim = 2 * (2 + s.n);
  DenseMatrix jac(dim, dim);
  const double x1 = x.a1.real(), y1 = x.a1.imag();
  const double x2 = x.a2.real(), y2 = x.a2.imag();
  const double c = s.chi0;

  jac(0, 0) = -s.kappa1 / 2.0 + c * x2;
  jac(0, 1) = s.delta_c + c * y2;
  jac(0, 2) = c * x1;
  jac(0, 3) = c * y1;
  jac(1, 0) = -s.delta_c + c * y2;
  jac(1, 1) = -s.kappa1 / 2.0 - c * x2;
  jac(1, 2) = -c * y1;
  jac(1, 3) = c * x1;

  jac(2, 0) = -c * x1;
  jac(2, 1) = c * y1;
  jac(2, 2) = -s.kappa2 / 2.0;
  jac(2, 3) = s.delta_c_prime;
  jac(3, 0) = -c * y1;
  jac(3, 1) = -c * x1;
  jac(3, 2) = -s.delta_c_prime;
  jac(3, 3) = -s.kappa2 / 2.0;

  for (int j = 0; j < s.n; ++j) {
    const int r = 4 + 2 * j;
    const double u = x.b[j].real();
    jac(r, r) = -s.gamma[j] / 2.0;
    jac(r, r + 1) = s.omega[j];
    jac(r + 1, r) = -s.omega[j] - s.eta[j] * (48.0 * u * u + 12.0);
    jac(r + 1, r + 1) = -s.gamma[j] / 2.0;
    jac(r + 1, 0) = 2.0 * s.g1[j] * x1;
    jac(r + 1, 1) = 2.0 * s.g1[j] * y1;
    jac(r + 1, 2) = 2.0 * s.g2[j] * x2;
    jac(r + 1, 3) = 2.0 * s.g2[j] * y2;
  }
  return jac;
}

// Damped Newton on the split system. Returns iterations used; updates x.
long newton_refine(const ScaledSystem& s, State& x, double abs_target, int max_iters,
                   bool* ok) {
  *ok = false;
  long used = 0;
  double fnorm = rhs_norm(rhs(s, x));
  for (int it = 0; it < max_iters; ++it) {
    if (fnorm <= abs_target) {
      *ok = true;
      return used;
    }
    ++used;
    std::vector<double> f = residual_vector(s, x);
    for (double& v : f) v = -v;
    std::vector<double> step;
    try {
      step = lu_solve(jacobian(s, x), f);
    } catch (const SingularMatrixError&) {
      return used;  // singular Jacobian: give up, caller keeps best state
    }
    std::vector<double> base;
    pack(x, base);
    double lambda = 1.0;
    bool improved = false;
    while (lambda >= 1.0 / 1024.0) {
      std::vector<double> trial = base;
      for (size_t i = 0; i < trial.size(); ++i) trial[i] += lambda * step[i];
      State xs = unpack(trial, s.n);
      double fn = rhs_norm(rhs(s, xs));
      if (fn < fnorm) {
        x = xs;
        fnorm = fn;
        improved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!improved) return used;
  }
  *ok = fnorm <= abs_target;
  return used;
}

MeanFieldState to_result(const ScaledSystem& s, const State& x, long iterations,
                         bool converged, bool diverged) {
  MeanFieldState r;
  r.alpha1 = x.a1;
  r.alpha2 = x.a2;
  r.beta = x.b;
  r.residual_norm = rhs_norm(rhs(s, x)) / s.drive_scale();
  r.iterations = iterations;
  r.converged = converged;
  r.diverged = diverged;
  return r;
}

}  // namespace

std::vector<std::complex<double>> meanfield_rhs(const MeanFieldState& state,
                                                const PhysicalParams& p) {
  validate(p);
  if (static_cast<int>(state.beta.size()) != p.n_modes)
    throw ValidationError("beta: length does not match n_modes");
  const double w1 = p.omega[0];
  ScaledSystem s(p);
  State x{state.alpha1, state.alpha2, state.beta};
  auto f = rhs(s, x);
  for (cplx& v : f) v *= w1;  // back to the caller's units
  return f;
}

MeanFieldState solve_meanfield(const PhysicalParams& p, const MeanFieldSolverConfig& cfg,
                               const MeanFieldState* warm_start) {
  validate(p);
  if (!(cfg.tolerance > 0.0)) throw ValidationError("tolerance: must be positive");
  if (cfg.max_iterations < 1) throw ValidationError("max_iterations: must be at least 1");

  ScaledSystem s(p);
  State x;
  x.b.assign(s.n, cplx(0.0, 0.0));
  if (warm_start) {
    if (static_cast<int>(warm_start->beta.size()) != s.n)
      throw ValidationError("warm start: beta length does not match n_modes");
    x.a1 = warm_start->alpha1;
    x.a2 = warm_start->alpha2;
    x.b = warm_start->beta;
  }

  const double abs_tol = cfg.tolerance * s.drive_scale();
  long iterations = 0;

  if (cfg.strategy != MeanFieldStrategy::NewtonOnly) {
    // Relaxation stage: damped time integration following the flow
    // (pseudo-transient continuation). Every step is accepted and the step
    // size tracks the residual, so a genuinely unstable classical branch
    // runs away and trips the blow-up detector instead of being pinned to
    // an unphysical stationary point. For RelaxThenNewton the stage only
    // needs to reach the Newton basin; RelaxOnly pushes to full tolerance.
    const double relax_target = (cfg.strategy == MeanFieldStrategy::RelaxOnly)
                                    ? abs_tol
                                    : std::max(abs_tol, 1e-7 * s.drive_scale());
    double h = cfg.time_step_init;
    double res = rhs_norm(rhs(s, x));
    for (int it = 0; it < cfg.max_iterations && res > relax_target; ++it) {
      ++iterations;
      State next = implicit_euler_step(s, x, h);
      double next_norm = state_norm(next);
      if (!std::isfinite(next_norm) || next_norm > cfg.blowup_norm)
        return to_result(s, x, iterations, false, true);
      double next_res = rhs_norm(rhs(s, next));
      x = next;
      if (std::isfinite(next_res) && next_res > 0.0 && res > 0.0) {
        double growth = std::min(std::max(res / next_res, 0.3), 1.5);
        h = std::min(std::max(h * growth, 1e-12), 1e6);
      }
      res = next_res;
      if (!std::isfinite(res)) return to_result(s, x, iterations, false, true);
    }
    if (cfg.strategy == MeanFieldStrategy::RelaxThenNewton && res > relax_target) {
      // relaxation never settled; report the best state without refinement
      // so an unstable branch is not polished into a spurious fixed point
      return to_result(s, x, iterations, res <= abs_tol, false);
    }
  }

  if (cfg.strategy != MeanFieldStrategy::RelaxOnly) {
    bool ok = false;
    iterations += newton_refine(s, x, abs_tol, cfg.max_newton_iterations, &ok);
  }

  double final_res = rhs_norm(rhs(s, x));
  return to_result(s, x, iterations, final_res <= abs_tol, false);
}

std::vector<MeanFieldSweepRow> sweep_meanfield(const PhysicalParams& p,
                                               const std::vector<double>& powers,
                                               const MeanFieldSolverConfig& cfg) {
  validate(p);
  if (powers.empty()) throw ValidationError("powers: must be nonempty");
  for (size_t i = 1; i < powers.size(); ++i)
    if (!(powers[i] > powers[i - 1]))
      throw ValidationError("powers: must be strictly ascending");

  std::vector<MeanFieldSweepRow> rows;
  rows.reserve(powers.size());
  const MeanFieldState* warm = nullptr;
  for (double power : powers) {
    PhysicalParams pp = p;
    pp.P1 = power;
    pp.P2 = power;
    MeanFieldSweepRow row;
    row.power = power;
    row.state = solve_meanfield(pp, cfg, warm);
    rows.push_back(std::move(row));
    warm = rows.back().state.converged ? &rows.back().state : nullptr;
  }
  return rows;
}

namespace {

void put_g17(std::ostream& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_meanfield_csv(const std::vector<MeanFieldSweepRow>& rows, int n_modes,
                         std::ostream& out) {
  out << "P_watt,abs_alpha1,abs_alpha2";
  for (int j = 1; j <= n_modes; ++j) out << ",abs_beta_" << j;
  for (int j = 1; j <= n_modes; ++j) out << ",phase_beta_" << j;
  out << ",converged\n";
  for (const auto& row : rows) {
    put_g17(out, row.power);
    out << ',';
    put_g17(out, std::abs(row.state.alpha1));
    out << ',';
    put_g17(out, std::abs(row.state.alpha2));
    for (int j = 0; j < n_modes; ++j) {
      out << ',';
      put_g17(out, std::abs(row.state.beta[j]));
    }
    for (int j = 0; j < n_modes; ++j) {
      out << ',';
      put_g17(out, std::arg(row.state.beta[j]));
    }
    out << ',' << (row.state.converged ? 1 : 0) << '\n';
  }
}

void write_meanfield_json(const std::vector<MeanFieldSweepRow>& rows, int n_modes,
                          std::ostream& out) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& row : rows) {
    nlohmann::ordered_json r;
    r["P_watt"] = row.power;
    r["abs_alpha1"] = std::abs(row.state.alpha1);
    r["abs_alpha2"] = std::abs(row.state.alpha2);
    for (int j = 0; j < n_modes; ++j)
      r["abs_beta_" + std::to_string(j + 1)] = std::abs(row.state.beta[j]);
    for (int j = 0; j < n_modes; ++j)
      r["phase_beta_" + std::to_string(j + 1)] = std::arg(row.state.beta[j]);
    r["residual_norm"] = row.state.residual_norm;
    r["iterations"] = row.state.iterations;
    r["converged"] = row.state.converged;
    r["diverged"] = row.state.diverged;
    doc.push_back(std::move(r));
  }
  out << doc.dump(2) << '\n';
}

}  // namespace dmcool
