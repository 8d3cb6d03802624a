#include "pch/nonneg_qp.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <vector>

namespace pch {

double projected_gradient_norm(const VectorXd& u, const VectorXd& grad,
                               Index free_count) {
  double worst = 0.0;
  for (Index i = 0; i < u.size(); ++i) {
    double r;
    if (i < free_count || u(i) > 0.0) {
      r = std::abs(grad(i));
    } else {
      r = std::max(0.0, -grad(i));
    }
    worst = std::max(worst, r);
  }
  return worst;
}

namespace {

void project(VectorXd& u, Index free_count) {
  for (Index i = free_count; i < u.size(); ++i) u(i) = std::max(u(i), 0.0);
}

// Solve the stationarity system on the variables not pinned at zero. Returns
// false when the candidate leaves the feasible set.
bool polish(const MatrixXd& H, const VectorXd& g, Index free_count,
            const VectorXd& u, const VectorXd& grad, VectorXd& out) {
  const Index dim = u.size();
  std::vector<Index> active;
  active.reserve(dim);
  for (Index i = 0; i < dim; ++i) {
    const bool pinned = i >= free_count && u(i) <= 0.0 && grad(i) >= 0.0;
    if (!pinned) active.push_back(i);
  }
  out = VectorXd::Zero(dim);
  if (active.empty()) return true;

  const Index f = static_cast<Index>(active.size());
  MatrixXd Hff(f, f);
  VectorXd rhs(f);
  for (Index a = 0; a < f; ++a) {
    rhs(a) = -g(active[a]);
    for (Index b = 0; b < f; ++b) Hff(a, b) = H(active[a], active[b]);
  }
  Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(Hff);
  const VectorXd sol = cod.solve(rhs);
  if (!sol.allFinite()) return false;
  for (Index a = 0; a < f; ++a) {
    if (active[a] >= free_count && sol(a) < 0.0) return false;
    out(active[a]) = sol(a);
  }
  return true;
}

}  // namespace

NonnegQPResult solve_nonneg_qp(const MatrixXd& H, const VectorXd& g,
                               Index free_count, const NonnegQPOptions& opts,
                               const VectorXd* warm_start) {
  const Index dim = g.size();
  NonnegQPResult res;
  res.u = VectorXd::Zero(dim);
  if (warm_start != nullptr && warm_start->size() == dim) {
    res.u = *warm_start;
    project(res.u, free_count);
  }
  if (dim == 0) {
    res.status = QPStatus::Converged;
    return res;
  }

  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(H, Eigen::EigenvaluesOnly);
  const double lip = eig.eigenvalues().maxCoeff();

  VectorXd grad = H * res.u + g;
  res.projected_gradient = projected_gradient_norm(res.u, grad, free_count);
  if (res.projected_gradient <= opts.tol) {
    res.status = QPStatus::Converged;
    return res;
  }

  if (!(lip > 0.0)) {
    // H == 0: a linear objective with nonzero projected gradient is
    // unbounded below.
    res.status = QPStatus::Unbounded;
    return res;
  }

  const double step = 1.0 / lip;
  VectorXd x = res.u;
  VectorXd y = x;
  VectorXd x_prev = x;
  double momentum = 1.0;
  VectorXd candidate;

  for (int it = 1; it <= opts.max_iters; ++it) {
    const VectorXd grad_y = H * y + g;
    x_prev = x;
    x = y - step * grad_y;
    project(x, free_count);

    // Gradient-mapping restart keeps the acceleration monotone in practice.
    if ((grad_y).dot(x - x_prev) > 0.0) {
      momentum = 1.0;
      y = x;
    } else {
      const double next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      y = x + ((momentum - 1.0) / next) * (x - x_prev);
      momentum = next;
    }

    res.iterations = it;
    if (x.norm() > opts.divergence) {
      res.u = x;
      res.status = QPStatus::Unbounded;
      return res;
    }

    if (it % opts.polish_every == 0 || it == opts.max_iters) {
      grad = H * x + g;
      double pg = projected_gradient_norm(x, grad, free_count);
      if (pg <= opts.tol) {
        res.u = x;
        res.projected_gradient = pg;
        res.status = QPStatus::Converged;
        return res;
      }
      if (polish(H, g, free_count, x, grad, candidate)) {
        const VectorXd cgrad = H * candidate + g;
        const double cpg = projected_gradient_norm(candidate, cgrad, free_count);
        if (cpg <= opts.tol) {
          res.u = candidate;
          res.projected_gradient = cpg;
          res.status = QPStatus::Converged;
          return res;
        }
      }
      res.projected_gradient = pg;
    }
  }
  res.u = x;
  res.status = QPStatus::IterationCap;
  return res;
}

}  // namespace pch
