#include "dmcool/numkernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace dmcool {

namespace {
constexpr double kEps = std::numeric_limits<double>::epsilon();
}

DenseMatrix DenseMatrix::identity(int n) {
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

void DenseMatrix::symmetrize() {
  for (int i = 0; i < rows_; ++i)
    for (int j = i + 1; j < cols_; ++j) {
      double avg = 0.5 * ((*this)(i, j) + (*this)(j, i));
      (*this)(i, j) = avg;
      (*this)(j, i) = avg;
    }
}

double DenseMatrix::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

double DenseMatrix::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

DenseMatrix& DenseMatrix::operator+=(const DenseMatrix& other) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator-=(const DenseMatrix& other) {
  for (size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

DenseMatrix& DenseMatrix::operator*=(double s) {
  for (double& v : data_) v *= s;
  return *this;
}

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b) { return a += b; }
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b) { return a -= b; }
DenseMatrix operator*(double s, DenseMatrix a) { return a *= s; }

DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
  DenseMatrix c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int k = 0; k < a.cols(); ++k) {
      double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  return c;
}

// ---------------------------------------------------------------------------
// LU with partial pivoting
// ---------------------------------------------------------------------------

namespace {

// Shared elimination core; the Lyapunov path instantiates it in extended
// precision where the Kronecker system inherits a squared condition number.
template <typename Scalar>
struct LuCore {
  int n = 0;
  std::vector<Scalar> lu;  // row-major
  std::vector<int> perm;

  Scalar& at(int i, int j) { return lu[static_cast<size_t>(i) * n + j]; }
  Scalar at(int i, int j) const { return lu[static_cast<size_t>(i) * n + j]; }

  void factor() {
    perm.resize(n);
    Scalar scale = 0;
    for (const Scalar& v : lu) scale = std::max(scale, std::abs(v));
    const Scalar tiny =
        static_cast<Scalar>(std::max(n, 1)) * std::numeric_limits<Scalar>::epsilon() * scale;
    for (int k = 0; k < n; ++k) {
      int piv = k;
      Scalar best = std::abs(at(k, k));
      for (int i = k + 1; i < n; ++i) {
        Scalar v = std::abs(at(i, k));
        if (v > best) {
          best = v;
          piv = i;
        }
      }
      if (best <= tiny)
        throw SingularMatrixError("lu_solve: matrix is singular to working precision (pivot " +
                                  std::to_string(static_cast<double>(best)) + " at column " +
                                  std::to_string(k) + ")");
      perm[k] = piv;
      if (piv != k)
        for (int j = 0; j < n; ++j) std::swap(at(k, j), at(piv, j));
      const Scalar inv_pivot = Scalar(1) / at(k, k);
      for (int i = k + 1; i < n; ++i) {
        Scalar f = at(i, k) * inv_pivot;
        at(i, k) = f;
        if (f == Scalar(0)) continue;
        for (int j = k + 1; j < n; ++j) at(i, j) -= f * at(k, j);
      }
    }
  }

  void solve_in_place(std::vector<Scalar>& rhs) const {
    // the stored L carries the end-state row order, so every interchange is
    // applied before the substitution sweeps
    for (int k = 0; k < n; ++k)
      if (perm[k] != k) std::swap(rhs[k], rhs[perm[k]]);
    for (int k = 0; k < n; ++k)
      for (int i = k + 1; i < n; ++i) rhs[i] -= at(i, k) * rhs[k];
    for (int i = n - 1; i >= 0; --i) {
      Scalar s = rhs[i];
      for (int j = i + 1; j < n; ++j) s -= at(i, j) * rhs[j];
      rhs[i] = s / at(i, i);
    }
  }
};

}  // namespace

LuFactorization::LuFactorization(DenseMatrix m) : lu_(std::move(m)) {
  if (lu_.rows() != lu_.cols()) throw ValidationError("LuFactorization: matrix must be square");
  const int n = lu_.rows();
  LuCore<double> core;
  core.n = n;
  core.lu = lu_.data();
  core.factor();
  lu_.data() = std::move(core.lu);
  perm_ = std::move(core.perm);
}

std::vector<double> LuFactorization::solve(std::vector<double> rhs) const {
  const int n = lu_.rows();
  if (static_cast<int>(rhs.size()) != n) throw ValidationError("lu_solve: rhs length mismatch");
  for (int k = 0; k < n; ++k)
    if (perm_[k] != k) std::swap(rhs[k], rhs[perm_[k]]);
  for (int k = 0; k < n; ++k)
    for (int i = k + 1; i < n; ++i) rhs[i] -= lu_(i, k) * rhs[k];
  for (int i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    for (int j = i + 1; j < n; ++j) s -= lu_(i, j) * rhs[j];
    rhs[i] = s / lu_(i, i);
  }
  return rhs;
}

std::vector<double> lu_solve(const DenseMatrix& m, const std::vector<double>& b) {
  return LuFactorization(m).solve(b);
}

// ---------------------------------------------------------------------------
// Eigenvalues: balancing + Hessenberg + Francis double-shift QR
// ---------------------------------------------------------------------------

namespace {

// Parlett-Reinsch balancing (norm equalization by radix powers); eigenvalues
// only, so the scaling record is not kept.
void balance(DenseMatrix& a) {
  const int n = a.rows();
  const double radix = 2.0;
  const double sq = radix * radix;
  bool done = false;
  while (!done) {
    done = true;
    for (int i = 0; i < n; ++i) {
      double r = 0.0, c = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) {
          c += std::abs(a(j, i));
          r += std::abs(a(i, j));
        }
      if (c == 0.0 || r == 0.0) continue;
      double g = r / radix;
      double f = 1.0;
      double s = c + r;
      while (c < g) {
        f *= radix;
        c *= sq;
      }
      g = r * radix;
      while (c > g) {
        f /= radix;
        c /= sq;
      }
      if ((c + r) / f < 0.95 * s) {
        done = false;
        double ginv = 1.0 / f;
        for (int j = 0; j < n; ++j) a(i, j) *= ginv;
        for (int j = 0; j < n; ++j) a(j, i) *= f;
      }
    }
  }
}

// Householder reduction to upper Hessenberg form (in place).
void hessenberg(DenseMatrix& a) {
  const int n = a.rows();
  std::vector<double> v(n);
  for (int k = 0; k < n - 2; ++k) {
    double scale = 0.0;
    for (int i = k + 1; i < n; ++i) scale += std::abs(a(i, k));
    if (scale == 0.0) continue;
    double h = 0.0;
    for (int i = k + 1; i < n; ++i) {
      v[i] = a(i, k) / scale;
      h += v[i] * v[i];
    }
    double g = std::sqrt(h);
    if (v[k + 1] > 0.0) g = -g;
    h -= v[k + 1] * g;
    v[k + 1] -= g;
    // apply P = I - v v^T / h from left and right
    for (int j = 0; j < n; ++j) {
      double f = 0.0;
      for (int i = k + 1; i < n; ++i) f += v[i] * a(i, j);
      f /= h;
      for (int i = k + 1; i < n; ++i) a(i, j) -= f * v[i];
    }
    for (int i = 0; i < n; ++i) {
      double f = 0.0;
      for (int j = k + 1; j < n; ++j) f += a(i, j) * v[j];
      f /= h;
      for (int j = k + 1; j < n; ++j) a(i, j) -= f * v[j];
    }
    a(k + 1, k) = scale * g;
    for (int i = k + 2; i < n; ++i) a(i, k) = 0.0;
  }
}

// Francis double-shift QR on an upper Hessenberg matrix (EISPACK hqr scheme).
// Destroys a; appends eigenvalues to out.
void hqr(DenseMatrix& a, std::vector<std::complex<double>>& out) {
  const int n = a.rows();
  out.assign(n, {0.0, 0.0});
  double anorm = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
  if (anorm == 0.0) return;  // zero matrix

  int nn = n - 1;
  double t = 0.0;
  while (nn >= 0) {
    int its = 0;
    int l;
    do {
      // search for a negligible subdiagonal element
      for (l = nn; l >= 1; --l) {
        double s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
        if (s == 0.0) s = anorm;
        if (std::abs(a(l, l - 1)) <= kEps * s) {
          a(l, l - 1) = 0.0;
          break;
        }
      }
      double x = a(nn, nn);
      if (l == nn) {  // single real root
        out[nn] = {x + t, 0.0};
        --nn;
      } else {
        double y = a(nn - 1, nn - 1);
        double w = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {  // 2x2 block: real pair or conjugate pair
          double p = 0.5 * (y - x);
          double q = p * p + w;
          double z = std::sqrt(std::abs(q));
          x += t;
          if (q >= 0.0) {
            z = p + (p >= 0.0 ? z : -z);
            out[nn - 1] = {x + z, 0.0};
            out[nn] = out[nn - 1];
            if (z != 0.0) out[nn] = {x - w / z, 0.0};
          } else {
            out[nn - 1] = {x + p, z};
            out[nn] = {x + p, -z};  // exact conjugate pairing
          }
          nn -= 2;
        } else {
          if (its == 30)
            throw NumericalError("eigenvalues: QR iteration failed to converge");
          if (its == 10 || its == 20) {  // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            double s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            w = -0.4375 * s * s;
          }
          ++its;
          int m;
          double p = 0.0, q = 0.0, r = 0.0;
          for (m = nn - 2; m >= l; --m) {  // two consecutive small subdiagonals
            double z = a(m, m);
            double rr = x - z;
            double ss = y - z;
            p = (rr * ss - w) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - rr - ss;
            r = a(m + 2, m + 1);
            double s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= kEps * v) break;
          }
          for (int i = m + 2; i <= nn; ++i) {
            a(i, i - 2) = 0.0;
            if (i != m + 2) a(i, i - 3) = 0.0;
          }
          for (int k = m; k <= nn - 1; ++k) {  // double QR sweep
            if (k != m) {
              p = a(k, k - 1);
              q = a(k + 1, k - 1);
              r = (k != nn - 1) ? a(k + 2, k - 1) : 0.0;
              x = std::abs(p) + std::abs(q) + std::abs(r);
              if (x != 0.0) {
                p /= x;
                q /= x;
                r /= x;
              }
            }
            double s = std::sqrt(p * p + q * q + r * r);
            if (p < 0.0) s = -s;
            if (s != 0.0) {
              if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
              } else {
                a(k, k - 1) = -s * x;
              }
              p += s;
              x = p / s;
              double y2 = q / s;
              double z2 = r / s;
              q /= p;
              r /= p;
              for (int j = k; j <= nn; ++j) {  // row modification
                double pp = a(k, j) + q * a(k + 1, j);
                if (k != nn - 1) {
                  pp += r * a(k + 2, j);
                  a(k + 2, j) -= pp * z2;
                }
                a(k + 1, j) -= pp * y2;
                a(k, j) -= pp * x;
              }
              int mmin = std::min(nn, k + 3);
              for (int i = l; i <= mmin; ++i) {  // column modification
                double pp = x * a(i, k) + y2 * a(i, k + 1);
                if (k != nn - 1) {
                  pp += z2 * a(i, k + 2);
                  a(i, k + 2) -= pp * r;
                }
                a(i, k + 1) -= pp * q;
                a(i, k) -= pp;
              }
            }
          }
        }
      }
    } while (l < nn - 1);
  }
}

}  // namespace

std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m) {
  if (m.rows() != m.cols()) throw ValidationError("eigenvalues: matrix must be square");
  if (m.rows() == 0) return {};
  DenseMatrix a = m;
  balance(a);
  hessenberg(a);
  std::vector<std::complex<double>> ev;
  hqr(a, ev);
  return ev;
}

double max_real_eigenvalue(const DenseMatrix& m) {
  double worst = -std::numeric_limits<double>::infinity();
  for (const auto& ev : eigenvalues(m)) worst = std::max(worst, ev.real());
  return worst;
}

// ---------------------------------------------------------------------------
// Continuous Lyapunov equation
// ---------------------------------------------------------------------------

DenseMatrix solve_lyapunov(const DenseMatrix& a, const DenseMatrix& q) {
  const int n = a.rows();
  if (a.cols() != n) throw ValidationError("solve_lyapunov: A must be square");
  if (q.rows() != n || q.cols() != n) throw ValidationError("solve_lyapunov: Q dimension mismatch");
  double qscale = q.max_abs();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(q(i, j) - q(j, i)) > 1e-12 * std::max(qscale, 1.0))
        throw ValidationError("solve_lyapunov: Q must be symmetric");

  const double anorm = a.frobenius_norm();
  const double max_re = max_real_eigenvalue(a);
  if (!(max_re < -kStabilityMargin * anorm))
    throw UnstableSystemError("solve_lyapunov: A is not strictly stable (max Re eig = " +
                                  std::to_string(max_re) + ")",
                              max_re);

  // Kronecker system (I (x) A + A (x) I) vec(X) = -vec(Q), column-stacked:
  // index v(i,j) = j*n + i for entry X(i,j). The operator inherits a squared
  // condition number from A (weakly damped modes push it to ~1/gamma^2), so
  // the factorization runs in extended precision with refinement on top;
  // plain double LU can leave an O(1) residual on the strongly coupled,
  // weakly damped systems this library exists for.
  const int nn = n * n;
  std::vector<long double> mat(static_cast<size_t>(nn) * nn, 0.0L);
  std::vector<long double> rhs(nn);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const int row = j * n + i;
      rhs[row] = -static_cast<long double>(q(i, j));
      for (int k = 0; k < n; ++k) {
        mat[static_cast<size_t>(row) * nn + (j * n + k)] += a(i, k);  // (A X)_{ij}
        mat[static_cast<size_t>(row) * nn + (k * n + i)] += a(j, k);  // (X A^T)_{ij}
      }
    }

  LuCore<long double> lu;
  lu.n = nn;
  lu.lu = mat;
  lu.factor();
  std::vector<long double> x = rhs;
  lu.solve_in_place(x);

  // a few refinement passes close the remaining gap
  for (int pass = 0; pass < 4; ++pass) {
    std::vector<long double> r(nn);
    long double rnorm = 0.0L, xnorm = 0.0L;
    for (int i = 0; i < nn; ++i) {
      long double acc = rhs[i];
      const long double* row = &mat[static_cast<size_t>(i) * nn];
      for (int j = 0; j < nn; ++j) acc -= row[j] * x[j];
      r[i] = acc;
      rnorm += acc * acc;
    }
    for (int i = 0; i < nn; ++i) xnorm += x[i] * x[i];
    if (rnorm <= xnorm * std::numeric_limits<long double>::epsilon() *
                     std::numeric_limits<long double>::epsilon() * nn)
      break;
    lu.solve_in_place(r);
    for (int i = 0; i < nn; ++i) x[i] += r[i];
  }

  DenseMatrix result(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) result(i, j) = static_cast<double>(x[j * n + i]);
  result.symmetrize();

  // residual contract
  const double qnorm = q.frobenius_norm();
  if (qnorm > 0.0) {
    double res = lyapunov_residual_norm(a, result, q);
    if (res > 1e-10 * qnorm)
      throw NumericalError("solve_lyapunov: residual " + std::to_string(res) +
                           " exceeds 1e-10 * ||Q||_F = " + std::to_string(1e-10 * qnorm));
  }
  return result;
}

double lyapunov_residual_norm(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& q) {
  const int n = a.rows();
  long double acc = 0.0L;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      long double r = q(i, j);
      for (int k = 0; k < n; ++k)
        r += static_cast<long double>(a(i, k)) * x(k, j) +
             static_cast<long double>(x(i, k)) * a(j, k);
      acc += r * r;
    }
  return static_cast<double>(std::sqrt(static_cast<double>(acc)));
}

// ---------------------------------------------------------------------------
// Matrix ODE integration (covariance evolution)
// ---------------------------------------------------------------------------

namespace {

DenseMatrix cov_rhs(const DenseMatrix& a, const DenseMatrix& d, const DenseMatrix& v) {
  DenseMatrix av = a * v;
  DenseMatrix r = av + av.transposed();
  r += d;
  return r;
}

DenseMatrix rk4_step(const DenseMatrix& a, const DenseMatrix& d, const DenseMatrix& v, double h) {
  DenseMatrix k1 = cov_rhs(a, d, v);
  DenseMatrix v2 = v;
  DenseMatrix tmp = k1;
  tmp *= 0.5 * h;
  v2 += tmp;
  DenseMatrix k2 = cov_rhs(a, d, v2);
  v2 = v;
  tmp = k2;
  tmp *= 0.5 * h;
  v2 += tmp;
  DenseMatrix k3 = cov_rhs(a, d, v2);
  v2 = v;
  tmp = k3;
  tmp *= h;
  v2 += tmp;
  DenseMatrix k4 = cov_rhs(a, d, v2);
  DenseMatrix out = v;
  k2 *= 2.0;
  k3 *= 2.0;
  k1 += k2;
  k1 += k3;
  k1 += k4;
  k1 *= h / 6.0;
  out += k1;
  return out;
}

}  // namespace

OdeResult integrate_matrix_ode(const DenseMatrix& a, const DenseMatrix& d, DenseMatrix v0,
                               double t_final, const OdeOptions& opts) {
  const int n = a.rows();
  if (a.cols() != n) throw ValidationError("integrate_matrix_ode: A must be square");
  if (d.rows() != n || d.cols() != n || v0.rows() != n || v0.cols() != n)
    throw ValidationError("integrate_matrix_ode: dimension mismatch");
  double vscale = v0.max_abs();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (std::abs(v0(i, j) - v0(j, i)) > 1e-12 * std::max(vscale, 1.0))
        throw ValidationError("integrate_matrix_ode: V0 must be symmetric");
  if (t_final < 0.0) throw ValidationError("integrate_matrix_ode: t_final must be nonnegative");

  OdeResult res;
  res.v = std::move(v0);
  if (t_final == 0.0 || n == 0) return res;

  const double anorm = a.frobenius_norm();
  double h = opts.initial_step > 0.0 ? opts.initial_step
                                     : std::min(t_final, 0.1 / std::max(anorm, 1e-300));
  const double h_min = t_final * opts.min_step_fraction;
  double t = 0.0;

  while (t < t_final) {
    if (h < h_min)
      throw NumericalError("integrate_matrix_ode: step underflow at t = " + std::to_string(t));
    if (t + h > t_final) h = t_final - t;

    // step doubling: one full step vs two half steps
    DenseMatrix full = rk4_step(a, d, res.v, h);
    DenseMatrix half = rk4_step(a, d, res.v, 0.5 * h);
    half = rk4_step(a, d, half, 0.5 * h);

    DenseMatrix diff = half;
    diff -= full;
    double err = diff.frobenius_norm() / 15.0;
    double scale = opts.local_tol * (1.0 + half.frobenius_norm());

    if (err <= scale) {
      // accept; local extrapolation gains one order
      diff *= 1.0 / 15.0;
      half += diff;
      half.symmetrize();
      res.v = std::move(half);
      t += h;
      res.steps += 1;
      res.error_estimate += err;
      double grow = (err > 0.0) ? 0.9 * std::pow(scale / err, 0.2) : 2.0;
      h *= std::min(2.0, std::max(1.0, grow));
    } else {
      res.rejected += 1;
      double shrink = 0.9 * std::pow(scale / err, 0.25);
      h *= std::max(0.1, shrink);
    }
  }
  res.t = t;
  return res;
}

}  // namespace dmcool
