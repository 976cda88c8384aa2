#ifndef DMCOOL_TEST_UTIL_HPP
#define DMCOOL_TEST_UTIL_HPP

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "dmcool/model.hpp"
#include "dmcool/numkernel.hpp"

namespace dmcool::test {

inline DenseMatrix random_matrix(std::mt19937_64& rng, int n, double scale = 1.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  DenseMatrix m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = u(rng);
  return m;
}

// Strictly stable random matrix: shift the spectrum left of -margin.
inline DenseMatrix random_stable_matrix(std::mt19937_64& rng, int n, double margin = 0.2) {
  DenseMatrix m = random_matrix(rng, n);
  double shift = max_real_eigenvalue(m) + margin;
  for (int i = 0; i < n; ++i) m(i, i) -= shift;
  return m;
}

inline DenseMatrix random_psd(std::mt19937_64& rng, int n) {
  DenseMatrix b = random_matrix(rng, n);
  return b * b.transposed();
}

// Random orthogonal matrix from a product of Householder reflections.
inline DenseMatrix random_orthogonal(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  DenseMatrix q = DenseMatrix::identity(n);
  for (int sweep = 0; sweep < 2; ++sweep) {
    std::vector<double> v(n);
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
      v[i] = g(rng);
      norm2 += v[i] * v[i];
    }
    // Q <- Q (I - 2 v v^T / |v|^2)
    DenseMatrix h = DenseMatrix::identity(n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) h(i, j) -= 2.0 * v[i] * v[j] / norm2;
    q = q * h;
  }
  return q;
}

inline std::vector<std::complex<double>> sorted_eigs(std::vector<std::complex<double>> ev) {
  std::sort(ev.begin(), ev.end(), [](const auto& a, const auto& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return ev;
}

// Two-mode effective parameter fixture used across the dynamics tests.
inline EffectiveParams two_mode(double kappa1, double chi, double lambda1, double lambda2,
                                double omega2 = 1.0, double g = 0.1) {
  EffectiveParams p;
  p.n_modes = 2;
  p.omega = {1.0, omega2};
  p.gamma = {1e-6, 1e-6};
  p.kappa1 = kappa1;
  p.delta_c = 1.0;
  p.G1 = {g, g};
  p.Lambda = {lambda1, lambda2};
  p.chi_mag = chi;
  p.phi = 0.5 * 3.141592653589793238462643383279;
  p.n_th = 1000.0;
  return p;
}

}  // namespace dmcool::test

#endif
