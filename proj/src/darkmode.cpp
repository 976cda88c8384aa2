#include "dmcool/darkmode.hpp"

#include <cmath>

namespace dmcool {

HybridModeAnalysis hybrid_params(double omega1, double omega2, double lambda1, double lambda2,
                                 double g11, double g12, double threshold) {
  const double w11 = g11 * g11;
  const double w12 = g12 * g12;
  const double norm2 = w11 + w12;
  if (!(norm2 > 0.0)) throw ValidationError("hybrid_params: coupling vector (G11, G12) is zero");
  // the cross product is computed once so that swapping the mode labels
  // negates xi_w and xi_L exactly
  const double cross = g11 * g12;
  HybridModeAnalysis h;
  h.omega_1w = (omega1 * w11 + omega2 * w12) / norm2;
  h.omega_2w = (omega1 * w12 + omega2 * w11) / norm2;
  h.omega_1L = (lambda1 * w11 + lambda2 * w12) / norm2;
  h.omega_2L = (lambda1 * w12 + lambda2 * w11) / norm2;
  h.g_plus = std::sqrt(norm2);
  h.xi_w = (omega1 - omega2) * cross / norm2;
  h.xi_L = (lambda1 - lambda2) * cross / norm2;
  h.dark = is_dark(h, threshold);
  return h;
}

bool is_dark(const HybridModeAnalysis& analysis, double threshold) {
  if (!(threshold > 0.0)) throw ValidationError("threshold: must be positive");
  return std::abs(analysis.xi_w) < threshold && std::abs(analysis.xi_L) < threshold;
}

std::vector<ModePairAnalysis> pairwise_hybrid_analysis(const EffectiveParams& p,
                                                       double threshold) {
  validate(p);
  if (p.n_modes < 2) throw ValidationError("n_modes: pairwise analysis needs at least 2 modes");
  std::vector<ModePairAnalysis> out;
  for (int j = 0; j < p.n_modes; ++j)
    for (int k = j + 1; k < p.n_modes; ++k) {
      ModePairAnalysis pa;
      pa.j = j;
      pa.k = k;
      if (p.G1[j] == 0.0 && p.G1[k] == 0.0) {
        // both modes fully decoupled from the cavity: trivially dark pair
        pa.analysis.omega_1w = p.omega[j];
        pa.analysis.omega_2w = p.omega[k];
        pa.analysis.omega_1L = p.Lambda[j];
        pa.analysis.omega_2L = p.Lambda[k];
        pa.analysis.dark = true;
      } else {
        pa.analysis = hybrid_params(p.omega[j], p.omega[k], p.Lambda[j], p.Lambda[k], p.G1[j],
                                    p.G1[k], threshold);
      }
      out.push_back(pa);
    }
  return out;
}

std::vector<ModePairAnalysis> pairwise_dark_scan(const EffectiveParams& p, double threshold) {
  std::vector<ModePairAnalysis> dark;
  for (auto& pa : pairwise_hybrid_analysis(p, threshold))
    if (pa.analysis.dark) dark.push_back(pa);
  return dark;
}

}  // namespace dmcool
