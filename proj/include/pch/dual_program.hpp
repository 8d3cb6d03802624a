#pragma once

#include <vector>

#include "pch/best_response.hpp"
#include "pch/minmax.hpp"

namespace pch {

struct DPConfig {
  int max_iters = 500;
  double step_a = 4e-3;  // kappa_t = step_a / sqrt(t)
  int p_window = 50;
  double divergence = 1e12;
};

struct DPIterate {
  DualPoint dual;
  SupportVector z;
  double f = 0.0;
  double kappa = 0.0;  // step used to leave this iterate
};

struct DPTrace {
  std::vector<DPIterate> iterates;
  double best_f = 0.0;
  std::vector<double> best_f_history;
  bool z_converged = false;
};

/// f(alpha, beta) = min over {z : sum z <= s} of L; returns the value and the
/// minimizing support.
std::pair<double, SupportVector> eval_f(const SpectralTruncation& trunc,
                                        const SparseQP& p, const DualPoint& d);

/// One projected subgradient step with the support z chosen at d:
///   alpha+ = (1 - kappa/2) alpha - (kappa eta / 2) S V^T diag(z) gamma(d)
///   beta+  = max{0, beta - kappa b - (kappa eta / 2) A diag(z) gamma(d)}
DualPoint dp_step(const SpectralTruncation& trunc, const QuadraticData& p,
                  const DualPoint& d, const SupportVector& z, double kappa);

/// Generic subgradient ascent loop over f = min_z value(z, .) where the
/// minimizing z comes from `select`.
DPTrace run_subgradient(const SpectralTruncation& trunc, const QuadraticData& p,
                        const DualPoint& d0, const DPConfig& cfg,
                        const SupportSelector& select, const IterateValue& value);

/// Dual subgradient ascent for the cardinality problem. Records max_iters
/// iterates; throws NumericalFailure if ||(alpha, beta)|| exceeds
/// cfg.divergence.
DPTrace run_dual_program(const SpectralTruncation& trunc, const SparseQP& p,
                         const DualPoint& d0, const DPConfig& cfg);

/// OR of the supports in the final min(p_window, T) iterates.
SupportVector screen_from_dp(const DPTrace& trace, int p_window);

}  // namespace pch
