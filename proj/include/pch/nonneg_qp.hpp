#pragma once

#include "pch/core_model.hpp"

namespace pch {

// Convex quadratic program with a mix of free and sign-constrained variables:
//
//   minimize  0.5 u^T H u + g^T u   s.t.  u_i >= 0 for i >= free_count
//
// H must be symmetric PSD. Solved by accelerated projected gradient with
// adaptive restart, periodically polished by an exact solve on the current
// free set. This is the workhorse behind the constrained best response and
// the constrained restricted QP.

enum class QPStatus { Converged, IterationCap, Unbounded };

struct NonnegQPOptions {
  double tol = 1e-9;          // projected-gradient infinity norm
  int max_iters = 200000;
  int polish_every = 25;
  double divergence = 1e12;   // ||u|| beyond this is treated as unbounded
};

struct NonnegQPResult {
  VectorXd u;
  QPStatus status = QPStatus::IterationCap;
  int iterations = 0;
  double projected_gradient = 0.0;
};

NonnegQPResult solve_nonneg_qp(const MatrixXd& H, const VectorXd& g,
                               Index free_count,
                               const NonnegQPOptions& opts = {},
                               const VectorXd* warm_start = nullptr);

/// Infinity norm of the projected gradient at u (zero iff u is optimal).
double projected_gradient_norm(const VectorXd& u, const VectorXd& grad,
                               Index free_count);

}  // namespace pch
