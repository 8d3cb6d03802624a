#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "pch/minmax.hpp"
#include "pch/nonneg_qp.hpp"

namespace pch {

struct BRConfig {
  int max_iters = 40;
  double qp_tol = 1e-9;
  int qp_max_iters = 200000;
  // false: z_{t+1} is selected from the previous duals (alpha_t, beta_t);
  // true:  z_{t+1} is selected from the fresh duals (alpha_{t+1}, beta_{t+1}).
  bool fresh_update = false;
};

struct BestResponse {
  DualPoint dual;
  QPStatus status = QPStatus::Converged;
  bool certified() const { return status == QPStatus::Converged; }
};

struct BRIterate {
  SupportVector z;
  DualPoint dual;
  double value = 0.0;  // L(z_t, alpha_t, beta_t), or H for the penalized run
};

struct BRTrace {
  std::vector<BRIterate> iterates;
  // Index into `iterates` of the first state of the detected cycle and its
  // length; period 1 means a fixed point. Both unset when max_iters ran out.
  std::optional<int> cycle_start;
  int cycle_period = 0;
  bool converged_certificate = false;
  bool fresh_update = false;
  bool all_best_responses_certified = true;
};

/// Closed-form best response when there are no linear constraints:
///   alpha = -(I/eta + S V^T diag(z) V S)^{-1} S V^T diag(z) c,  S = sqrt(Lambda)
VectorXd br_unconstrained(const SpectralTruncation& trunc, const QuadraticData& p,
                          const SupportVector& z);

/// Maximizer of L(z, ., .) over alpha free, beta >= 0, by projected gradient.
/// status is Unbounded when the dual diverges (restricted primal infeasible)
/// and IterationCap when qp_max_iters ran out; the best iterate is returned.
BestResponse br_constrained(const SpectralTruncation& trunc,
                            const QuadraticData& p, const SupportVector& z,
                            const BRConfig& cfg);

/// Dispatches to br_unconstrained (m == 0) or br_constrained.
BestResponse best_response(const SpectralTruncation& trunc,
                           const QuadraticData& p, const SupportVector& z,
                           const BRConfig& cfg);

/// Support minimizer used by the alternating loop; maps gamma to z.
using SupportSelector = std::function<SupportVector(const VectorXd& gamma)>;
/// Value recorded per iterate.
using IterateValue = std::function<double(const SupportVector&, const DualPoint&)>;

/// Generic alternating best-response loop shared by the cardinality and the
/// penalized variants.
BRTrace run_alternating(const SpectralTruncation& trunc, const QuadraticData& p,
                        const SupportVector& z0, const DualPoint& d0,
                        const BRConfig& cfg, const SupportSelector& select,
                        const IterateValue& value);

/// Alternating best response for the cardinality problem, started from
/// (z0, alpha = 0, beta = 0).
BRTrace run_best_response(const SpectralTruncation& trunc, const SparseQP& p,
                          const SupportVector& z0, const BRConfig& cfg);

/// Default start: select_support(c, s), i.e. the minimizer at zero duals.
SupportVector default_start(const SparseQP& p);

/// A uniformly random support with exactly s ones.
SupportVector random_support(Index n, int s, std::uint64_t seed);

/// OR of the last min(p_window, T) supports, united with one full cycle
/// when a cycle was detected.
SupportVector screen_from_trace(const BRTrace& trace, int p_window);

}  // namespace pch
