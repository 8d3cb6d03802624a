#include "pch/dual_program.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace pch {

std::pair<double, SupportVector> eval_f(const SpectralTruncation& trunc,
                                        const SparseQP& p, const DualPoint& d) {
  SupportVector z = select_support(gamma(trunc, p, d), p.s);
  const double value = eval_L(trunc, p, z, d);
  return {value, std::move(z)};
}

DualPoint dp_step(const SpectralTruncation& trunc, const QuadraticData& p,
                  const DualPoint& d, const SupportVector& z, double kappa) {
  if (!(kappa > 0.0)) throw InvalidProblem("dp_step: kappa must be positive");
  if (z.size() != p.n()) throw InvalidProblem("dp_step: support length mismatch");
  VectorXd zg = gamma(trunc, p, d);
  for (Index j = 0; j < zg.size(); ++j) {
    if (!z[j]) zg(j) = 0.0;
  }
  const double scale = 0.5 * kappa * p.eta;

  DualPoint next;
  next.alpha = (1.0 - 0.5 * kappa) * d.alpha -
               scale * trunc.sqrt_lambda.cwiseProduct(trunc.V.transpose() * zg);
  if (p.m() > 0) {
    next.beta = (d.beta - kappa * p.b - scale * (p.A * zg)).cwiseMax(0.0);
  } else {
    next.beta = VectorXd(0);
  }
  return next;
}

DPTrace run_subgradient(const SpectralTruncation& trunc, const QuadraticData& p,
                        const DualPoint& d0, const DPConfig& cfg,
                        const SupportSelector& select, const IterateValue& value) {
  check_dimensions(trunc, p, d0);
  if (cfg.max_iters < 1 || !(cfg.step_a > 0.0) || cfg.p_window < 1) {
    throw InvalidProblem("DP config: max_iters, step_a and p_window must be positive");
  }
  if ((d0.beta.array() < 0.0).any()) {
    throw InvalidProblem("DP start: beta must be nonnegative");
  }

  DPTrace trace;
  trace.iterates.reserve(static_cast<std::size_t>(cfg.max_iters));
  trace.best_f_history.reserve(static_cast<std::size_t>(cfg.max_iters));
  DualPoint d = d0;
  for (int t = 1; t <= cfg.max_iters; ++t) {
    SupportVector z = select(gamma(trunc, p, d));
    const double f = value(z, d);
    const double kappa = cfg.step_a / std::sqrt(static_cast<double>(t));
    trace.best_f = t == 1 ? f : std::max(trace.best_f, f);
    trace.best_f_history.push_back(trace.best_f);

    DualPoint next = dp_step(trunc, p, d, z, kappa);
    trace.iterates.push_back(DPIterate{std::move(d), std::move(z), f, kappa});

    const double norm = std::sqrt(next.alpha.squaredNorm() + next.beta.squaredNorm());
    if (!std::isfinite(norm) || norm > cfg.divergence) {
      std::ostringstream msg;
      msg << "dual program diverged at iteration " << t << ": ||(alpha,beta)|| = "
          << norm << " (step_a=" << cfg.step_a << ", eta=" << p.eta
          << ", lambda_1=" << (trunc.k > 0 ? trunc.eigenvalues(0) : 0.0)
          << "); reduce step_a";
      throw NumericalFailure(msg.str());
    }
    d = std::move(next);
  }

  const auto& its = trace.iterates;
  const int len = static_cast<int>(its.size());
  if (len >= cfg.p_window) {
    const SupportVector& last = its.back().z;
    trace.z_converged = std::all_of(its.end() - cfg.p_window, its.end(),
                                    [&](const DPIterate& it) { return it.z == last; });
  }
  return trace;
}

DPTrace run_dual_program(const SpectralTruncation& trunc, const SparseQP& p,
                         const DualPoint& d0, const DPConfig& cfg) {
  const int s = p.s;
  return run_subgradient(
      trunc, p, d0, cfg,
      [s](const VectorXd& g) { return select_support(g, s); },
      [&](const SupportVector& z, const DualPoint& d) {
        return eval_L(trunc, p, z, d);
      });
}

SupportVector screen_from_dp(const DPTrace& trace, int p_window) {
  if (trace.iterates.empty()) throw InvalidProblem("empty dual-program trace");
  if (p_window < 1) throw InvalidProblem("p_window must be positive");
  const int len = static_cast<int>(trace.iterates.size());
  SupportVector Z(trace.iterates.front().z.size());
  for (int t = std::max(0, len - p_window); t < len; ++t) {
    Z |= trace.iterates[static_cast<std::size_t>(t)].z;
  }
  return Z;
}

}  // namespace pch
