#include "pch/core_model.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace pch {
namespace {

void validate_quadratic(QuadraticData& p) {
  const Index n = p.Q.rows();
  if (n == 0 || p.Q.cols() != n) {
    std::ostringstream msg;
    msg << "Q must be square and non-empty, got " << p.Q.rows() << "x"
        << p.Q.cols();
    throw InvalidProblem(msg.str());
  }
  if (p.c.size() != n) {
    throw InvalidProblem("c has length " + std::to_string(p.c.size()) +
                         ", expected " + std::to_string(n));
  }
  // An empty A may arrive as 0x0; normalize to 0 x n.
  if (p.A.size() == 0 && p.b.size() == 0) p.A.resize(0, n);
  if (p.A.cols() != n) {
    throw InvalidProblem("A has " + std::to_string(p.A.cols()) +
                         " columns, expected " + std::to_string(n));
  }
  if (p.b.size() != p.A.rows()) {
    throw InvalidProblem("A has " + std::to_string(p.A.rows()) +
                         " rows but b has length " +
                         std::to_string(p.b.size()));
  }
  if (!(p.eta > 0.0) || !std::isfinite(p.eta)) {
    throw InvalidProblem("eta must be positive and finite");
  }
  if (!p.Q.allFinite() || !p.c.allFinite() || !p.A.allFinite() ||
      !p.b.allFinite()) {
    throw InvalidProblem("problem data contains non-finite entries");
  }

  p.Q = (0.5 * (p.Q + p.Q.transpose())).eval();

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(p.Q, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) {
    throw NumericalFailure("eigenvalue computation failed while validating Q");
  }
  const double lo = eig.eigenvalues()(0);
  const double hi = eig.eigenvalues()(n - 1);
  if (lo < -1e-8 * std::max(hi, 1e-12)) {
    std::ostringstream msg;
    msg << "Q is not positive semidefinite: minimum eigenvalue " << lo
        << " (largest " << hi << ")";
    throw InvalidProblem(msg.str());
  }
}

}  // namespace

SparseQP build_problem(MatrixXd Q, VectorXd c, MatrixXd A, VectorXd b, int s,
                       double eta) {
  SparseQP p;
  p.Q = std::move(Q);
  p.c = std::move(c);
  p.A = std::move(A);
  p.b = std::move(b);
  p.eta = eta;
  p.s = s;
  validate_quadratic(p);
  if (s < 1 || s > p.n()) {
    throw InvalidProblem("sparsity budget s=" + std::to_string(s) +
                         " outside [1, " + std::to_string(p.n()) + "]");
  }
  return p;
}

PenalizedQP build_penalized_problem(MatrixXd Q, VectorXd c, MatrixXd A,
                                    VectorXd b, double theta, double eta) {
  PenalizedQP p;
  p.Q = std::move(Q);
  p.c = std::move(c);
  p.A = std::move(A);
  p.b = std::move(b);
  p.eta = eta;
  p.theta = theta;
  validate_quadratic(p);
  if (!(theta >= 0.0) || !std::isfinite(theta)) {
    throw InvalidProblem("theta must be nonnegative and finite");
  }
  return p;
}

void validate(const RegressionData& data) {
  if (data.samples() < 1 || data.dims() < 1) {
    throw InvalidProblem("regression data needs at least one sample and one "
                         "feature");
  }
  if (data.targets.size() != data.samples()) {
    throw InvalidProblem("targets length does not match number of samples");
  }
  if (!data.features.allFinite() || !data.targets.allFinite()) {
    throw InvalidProblem("regression data contains non-finite entries");
  }
}

SparseQP from_regression(const RegressionData& data, int s, double eta) {
  validate(data);
  const double inv_n = 1.0 / static_cast<double>(data.samples());
  MatrixXd Q = inv_n * (data.features.transpose() * data.features);
  VectorXd c = (-2.0 * inv_n) * (data.features.transpose() * data.targets);
  return build_problem(std::move(Q), std::move(c), MatrixXd(0, data.dims()),
                       VectorXd(0), s, eta);
}

double objective(const QuadraticData& p, const VectorXd& x) {
  if (x.size() != p.n()) {
    throw InvalidProblem("x has length " + std::to_string(x.size()) +
                         ", expected " + std::to_string(p.n()));
  }
  return p.c.dot(x) + x.dot(p.Q * x) + x.squaredNorm() / p.eta;
}

bool satisfies_constraints(const QuadraticData& p, const VectorXd& x,
                           double tol) {
  if (p.m() == 0) return true;
  return ((p.A * x - p.b).array() <= tol).all();
}

bool feasible(const SparseQP& p, const VectorXd& x, double tol) {
  if (x.size() != p.n()) return false;
  const auto nonzeros = (x.array().abs() > tol).count();
  return nonzeros <= p.s && satisfies_constraints(p, x, tol);
}

}  // namespace pch
