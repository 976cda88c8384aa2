#ifndef DMCOOL_DARKMODE_HPP
#define DMCOOL_DARKMODE_HPP

#include <vector>

#include "dmcool/model.hpp"

namespace dmcool {

// Coefficients of the two-mode hybrid basis: a bright mode B1 that keeps the
// coupling G_plus to the cavity and an orthogonal mode B2 whose residual
// couplings are the mismatch terms xi_w (frequency) and xi_L (nonlinearity).
// B2 is dark when both vanish.
struct HybridModeAnalysis {
  double omega_1w = 0.0, omega_2w = 0.0;  // hybrid frequencies
  double omega_1L = 0.0, omega_2L = 0.0;  // hybrid nonlinear shifts
  double g_plus = 0.0;                    // bright-mode coupling
  double xi_w = 0.0;                      // frequency-mismatch coupling
  double xi_L = 0.0;                      // nonlinearity-mismatch coupling
  bool dark = false;
};

// Exact zeros occur in the degenerate case, so the default threshold is
// numerically-zero.
inline constexpr double kDarkThreshold = 1e-9;

//   omega_1w = (w1 G11^2 + w2 G12^2) / (G11^2 + G12^2)
//   omega_2w = (w1 G12^2 + w2 G11^2) / (G11^2 + G12^2)
//   omega_1L, omega_2L: same with Lambda in place of omega
//   g_plus   = sqrt(G11^2 + G12^2)
//   xi_w     = (w1 - w2) G11 G12 / (G11^2 + G12^2)
//   xi_L     = (L1 - L2) G11 G12 / (G11^2 + G12^2)
// Requires G11^2 + G12^2 > 0.
HybridModeAnalysis hybrid_params(double omega1, double omega2, double lambda1, double lambda2,
                                 double g11, double g12, double threshold = kDarkThreshold);

// True iff |xi_w| < threshold and |xi_L| < threshold.
bool is_dark(const HybridModeAnalysis& analysis, double threshold);

struct ModePairAnalysis {
  int j = 0, k = 0;  // mode indices, 0-based
  HybridModeAnalysis analysis;
};

// Hybrid analysis of every unordered mode pair (diagnostic; the two-mode
// transform applied pairwise).
std::vector<ModePairAnalysis> pairwise_hybrid_analysis(const EffectiveParams& p,
                                                       double threshold = kDarkThreshold);

// The pairs flagged dark. Requires N >= 2.
std::vector<ModePairAnalysis> pairwise_dark_scan(const EffectiveParams& p,
                                                 double threshold = kDarkThreshold);

}  // namespace dmcool

#endif
