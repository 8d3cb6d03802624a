#include "pch/penalized.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace pch {

PenalizedBRTrace run_best_response_penalized(const SpectralTruncation& trunc,
                                             const PenalizedQP& p,
                                             const SupportVector& z0,
                                             const BRConfig& cfg) {
  const double eta = p.eta;
  const double theta = p.theta;
  return run_alternating(
      trunc, p, z0, DualPoint::zeros(trunc.k, p.m()), cfg,
      [eta, theta](const VectorXd& g) {
        return select_support_penalized(g, eta, theta);
      },
      [&](const SupportVector& z, const DualPoint& d) {
        return eval_H(trunc, p, z, d);
      });
}

std::pair<double, SupportVector> eval_f_penalized(const SpectralTruncation& trunc,
                                                  const PenalizedQP& p,
                                                  const DualPoint& d) {
  SupportVector z = select_support_penalized(gamma(trunc, p, d), p.eta, p.theta);
  const double value = eval_H(trunc, p, z, d);
  return {value, std::move(z)};
}

PenalizedDPTrace run_dual_program_penalized(const SpectralTruncation& trunc,
                                            const PenalizedQP& p,
                                            const DualPoint& d0,
                                            const DPConfig& cfg) {
  const double eta = p.eta;
  const double theta = p.theta;
  return run_subgradient(
      trunc, p, d0, cfg,
      [eta, theta](const VectorXd& g) {
        return select_support_penalized(g, eta, theta);
      },
      [&](const SupportVector& z, const DualPoint& d) {
        return eval_H(trunc, p, z, d);
      });
}

double primal_value_penalized_k(const SpectralTruncation& trunc,
                                const PenalizedQP& p, const SupportVector& z) {
  return p.theta * static_cast<double>(z.count()) + primal_value_k(trunc, p, z);
}

double penalized_objective(const PenalizedQP& p, const VectorXd& x, double tol) {
  const auto nonzeros = (x.array().abs() > tol).count();
  return objective(p, x) + p.theta * static_cast<double>(nonzeros);
}

SparseSolution solve_reduced_penalized(const PenalizedQP& p, const SupportVector& Z,
                                       const EnumerationOptions& opts) {
  if (Z.size() != p.n()) throw InvalidProblem("Z has wrong length");
  const auto pool = Z.indices();
  if (pool.size() >= 63 || (std::uint64_t{1} << pool.size()) > opts.cap) {
    throw NumericalFailure("penalized enumeration over 2^" +
                           std::to_string(pool.size()) + " subsets exceeds the cap of " +
                           std::to_string(opts.cap));
  }

  double best_value = std::numeric_limits<double>::infinity();
  std::vector<Index> best_support;
  VectorXd best_x = VectorXd::Zero(p.n());
  std::uint64_t evaluated = 0;

  // Sizes in increasing order and lexicographic within a size, keeping the
  // first strict improvement: ties resolve to the smaller support.
  std::vector<Index> subset;
  for (std::size_t r = 0; r <= pool.size(); ++r) {
    std::vector<std::size_t> pos(r);
    for (std::size_t i = 0; i < r; ++i) pos[i] = i;
    while (true) {
      subset.resize(r);
      for (std::size_t i = 0; i < r; ++i) subset[i] = pool[pos[i]];
      const RestrictedSolution sol = restricted_qp(p, subset);
      ++evaluated;
      const double value = sol.value + p.theta * static_cast<double>(r);
      if (value < best_value) {
        best_value = value;
        best_support = subset;
        best_x = sol.x;
      }
      if (r == 0) break;
      std::size_t i = r;
      while (i > 0 && pos[i - 1] == pool.size() - r + (i - 1)) --i;
      if (i == 0) break;
      ++pos[i - 1];
      for (std::size_t j = i; j < r; ++j) pos[j] = pos[j - 1] + 1;
    }
  }
  if (!std::isfinite(best_value)) {
    throw NumericalFailure("every candidate support is infeasible for Ax <= b");
  }

  SparseSolution out;
  out.x = std::move(best_x);
  out.support = std::move(best_support);
  out.objective = objective(p, out.x) +
                  p.theta * static_cast<double>(out.support.size());
  out.exact = true;
  out.subsets_evaluated = evaluated;
  return out;
}

}  // namespace pch
