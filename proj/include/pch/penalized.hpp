#pragma once

#include "pch/best_response.hpp"
#include "pch/dual_program.hpp"
#include "pch/reduce_solve.hpp"

namespace pch {

// The l0-penalized variant reuses the alternating and subgradient loops; only
// the support rule changes (per-coordinate threshold instead of top-s), and
// recorded values are H rather than L.

using PenalizedBRTrace = BRTrace;
using PenalizedDPTrace = DPTrace;

/// Alternating best response on H, started from (z0, alpha = 0, beta = 0).
PenalizedBRTrace run_best_response_penalized(const SpectralTruncation& trunc,
                                             const PenalizedQP& p,
                                             const SupportVector& z0,
                                             const BRConfig& cfg);

/// min over z in {0,1}^n of H(z, alpha, beta) with its minimizer.
std::pair<double, SupportVector> eval_f_penalized(const SpectralTruncation& trunc,
                                                  const PenalizedQP& p,
                                                  const DualPoint& d);

/// Subgradient ascent on min_z H.
PenalizedDPTrace run_dual_program_penalized(const SpectralTruncation& trunc,
                                            const PenalizedQP& p,
                                            const DualPoint& d0,
                                            const DPConfig& cfg);

/// max over (alpha, beta >= 0) of H(z, ., .).
double primal_value_penalized_k(const SpectralTruncation& trunc,
                                const PenalizedQP& p, const SupportVector& z);

/// Exact minimum over all subsets S of support(Z) of
///   restricted value on S + theta |S|.
/// Ties go to the smaller support, then the lexicographically smaller one.
SparseSolution solve_reduced_penalized(const PenalizedQP& p, const SupportVector& Z,
                                       const EnumerationOptions& opts = {});

/// Penalized objective: objective(p, x) + theta * #{j : |x_j| > tol}.
double penalized_objective(const PenalizedQP& p, const VectorXd& x,
                           double tol = 0.0);

}  // namespace pch
