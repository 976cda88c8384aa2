#ifndef DMCOOL_NUMKERNEL_HPP
#define DMCOOL_NUMKERNEL_HPP

#include <complex>
#include <vector>

#include "dmcool/errors.hpp"

namespace dmcool {

// Dense real matrix, row-major, value semantics. Sized for the small
// systems this project deals with (dim <= a few hundred).
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(int rows, int cols) : rows_(rows), cols_(cols), data_(static_cast<size_t>(rows) * cols, 0.0) {}

  static DenseMatrix identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(int i, int j) { return data_[static_cast<size_t>(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[static_cast<size_t>(i) * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  DenseMatrix transposed() const;
  void symmetrize();  // M <- (M + M^T)/2, square only

  double frobenius_norm() const;
  double max_abs() const;

  DenseMatrix& operator+=(const DenseMatrix& other);
  DenseMatrix& operator-=(const DenseMatrix& other);
  DenseMatrix& operator*=(double s);

 private:
  int rows_ = 0, cols_ = 0;
  std::vector<double> data_;
};

DenseMatrix operator+(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator-(DenseMatrix a, const DenseMatrix& b);
DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b);
DenseMatrix operator*(double s, DenseMatrix a);

// LU decomposition with partial pivoting; factor once, solve many.
// Throws SingularMatrixError when a pivot is negligible relative to the
// matrix scale (singular to working precision).
class LuFactorization {
 public:
  explicit LuFactorization(DenseMatrix m);

  std::vector<double> solve(std::vector<double> rhs) const;
  int size() const { return lu_.rows(); }

 private:
  DenseMatrix lu_;
  std::vector<int> perm_;
};

// Solve M x = b, square M, partial pivoting.
std::vector<double> lu_solve(const DenseMatrix& m, const std::vector<double>& b);

// All eigenvalues of a square real matrix: Parlett-Reinsch balancing,
// Householder reduction to Hessenberg form, Francis double-shift QR.
// Complex eigenvalues are produced as exact conjugate pairs.
std::vector<std::complex<double>> eigenvalues(const DenseMatrix& m);

double max_real_eigenvalue(const DenseMatrix& m);

// Steady-state solution X of A X + X A^T + Q = 0 with A strictly stable and
// Q symmetric. Kronecker vectorization + dense LU, then iterative refinement
// so the residual lands at the rounding floor; X is symmetrized.
// Throws UnstableSystemError when A is not strictly stable.
DenseMatrix solve_lyapunov(const DenseMatrix& a, const DenseMatrix& q);

// ||A X + X A^T + Q||_F with extended-precision accumulation. The steady
// covariance often exceeds ||Q|| by many orders; a plain double evaluation
// would floor out above the residual contract.
double lyapunov_residual_norm(const DenseMatrix& a, const DenseMatrix& x, const DenseMatrix& q);

// Relative stability margin used when classifying spectra: strictly stable
// means max Re(lambda) < -margin * ||A||_F.
inline constexpr double kStabilityMargin = 1e-12;

struct OdeOptions {
  double local_tol = 1e-9;        // per-step error control
  double initial_step = 0.0;      // 0 -> heuristic from ||A||
  double min_step_fraction = 1e-14;  // step underflow threshold, fraction of t_final
};

struct OdeResult {
  DenseMatrix v;
  double t = 0.0;
  long steps = 0;
  long rejected = 0;
  double error_estimate = 0.0;  // accumulated local error estimates
};

// Integrate dV/dt = A V + V A^T + D from symmetric V0 to t_final with classic
// RK4 and step-doubling error control; V is symmetrized after each step.
OdeResult integrate_matrix_ode(const DenseMatrix& a, const DenseMatrix& d, DenseMatrix v0,
                               double t_final, const OdeOptions& opts = {});

}  // namespace dmcool

#endif
