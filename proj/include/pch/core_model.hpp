#pragma once

#include <Eigen/Dense>

#include "pch/errors.hpp"

namespace pch {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Quadratic data shared by the cardinality-constrained and the penalized
// problems:
//
//   minimize  <c, x> + <x, Q x> + ||x||^2 / eta   subject to  A x <= b
//
// Q is symmetric PSD (n x n), A is m x n with m possibly 0.
struct QuadraticData {
  MatrixXd Q;
  VectorXd c;
  MatrixXd A;
  VectorXd b;
  double eta = 1.0;

  Index n() const { return Q.rows(); }
  Index m() const { return A.rows(); }
};

/// Cardinality-constrained instance: adds ||x||_0 <= s.
struct SparseQP : QuadraticData {
  int s = 1;
};

/// l0-penalized instance: adds theta * ||x||_0 to the objective.
struct PenalizedQP : QuadraticData {
  double theta = 0.0;
};

/// Regression samples: one row of `features` per sample, `targets` aligned.
struct RegressionData {
  MatrixXd features;
  VectorXd targets;

  Index samples() const { return features.rows(); }
  Index dims() const { return features.cols(); }
};

/// Validates and symmetrizes the raw matrices. Throws InvalidProblem on
/// dimension mismatch, Q not PSD (beyond round-off), s outside [1, n], or
/// eta <= 0. Pass an empty (0 x n or 0 x 0) A and empty b for no constraints.
SparseQP build_problem(MatrixXd Q, VectorXd c, MatrixXd A, VectorXd b, int s,
                       double eta);

/// Same validation as build_problem; theta must be >= 0.
PenalizedQP build_penalized_problem(MatrixXd Q, VectorXd c, MatrixXd A,
                                    VectorXd b, double theta, double eta);

/// Throws InvalidProblem unless N >= 1, n >= 1 and every entry is finite.
void validate(const RegressionData& data);

/// Sparse ridge regression as a SparseQP:
///   Q = (1/N) sum w_i w_i^T,  c = -(2/N) sum xi_i w_i,  no constraints,
/// so that objective(x) + (1/N) sum xi_i^2 equals the mean squared residual
/// plus the ridge term.
SparseQP from_regression(const RegressionData& data, int s, double eta);

/// <c, x> + <x, Q x> + ||x||^2 / eta. Feasibility is not checked.
double objective(const QuadraticData& p, const VectorXd& x);

/// Ax <= b + tol and at most s entries with |x_j| > tol.
bool feasible(const SparseQP& p, const VectorXd& x, double tol = 1e-8);

/// Ax <= b + tol (no cardinality part).
bool satisfies_constraints(const QuadraticData& p, const VectorXd& x,
                           double tol = 1e-8);

}  // namespace pch
