#include "pch/best_response.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cstring>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>

namespace pch {
namespace {

// Rows of V sqrt(Lambda) restricted to the support, as a dense |z| x k block.
MatrixXd restricted_factor(const SpectralTruncation& trunc,
                           const std::vector<Index>& idx) {
  MatrixXd B(static_cast<Index>(idx.size()), trunc.k);
  for (std::size_t r = 0; r < idx.size(); ++r) {
    B.row(static_cast<Index>(r)) =
        trunc.V.row(idx[r]).cwiseProduct(trunc.sqrt_lambda.transpose());
  }
  return B;
}

void append_bytes(std::string& key, const VectorXd& v) {
  const auto* raw = reinterpret_cast<const char*>(v.data());
  key.append(raw, static_cast<std::size_t>(v.size()) * sizeof(double));
}

}  // namespace

VectorXd br_unconstrained(const SpectralTruncation& trunc, const QuadraticData& p,
                          const SupportVector& z) {
  if (p.m() != 0) {
    throw InvalidProblem("br_unconstrained requires a problem without linear "
                         "constraints");
  }
  if (z.size() != p.n() || trunc.n != p.n()) {
    throw InvalidProblem("br_unconstrained: dimension mismatch");
  }
  const auto idx = z.indices();
  const Index k = trunc.k;
  if (idx.empty()) return VectorXd::Zero(k);

  const MatrixXd B = restricted_factor(trunc, idx);
  VectorXd cz(static_cast<Index>(idx.size()));
  for (std::size_t r = 0; r < idx.size(); ++r) cz(static_cast<Index>(r)) = p.c(idx[r]);

  MatrixXd system = B.transpose() * B;
  system.diagonal().array() += 1.0 / p.eta;
  Eigen::LLT<MatrixXd> llt(system);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("best-response system is not positive definite");
  }
  return -llt.solve(B.transpose() * cz);
}

BestResponse br_constrained(const SpectralTruncation& trunc,
                            const QuadraticData& p, const SupportVector& z,
                            const BRConfig& cfg) {
  if (z.size() != p.n() || trunc.n != p.n()) {
    throw InvalidProblem("br_constrained: dimension mismatch");
  }
  const Index k = trunc.k;
  const Index m = p.m();
  const auto idx = z.indices();

  // With u = (alpha, beta) and gamma = c + G u restricted to the support,
  //   -L(u) = 0.5 u^T H u + g^T u + const,
  //   H = 0.5 blkdiag(I_k, 0) + (eta/2) G^T G,  g = (eta/2) G^T c_z + (0, b).
  const Index rows = static_cast<Index>(idx.size());
  MatrixXd G(rows, k + m);
  VectorXd cz(rows);
  for (Index r = 0; r < rows; ++r) {
    const Index j = idx[static_cast<std::size_t>(r)];
    G.row(r).head(k) = trunc.V.row(j).cwiseProduct(trunc.sqrt_lambda.transpose());
    if (m > 0) G.row(r).tail(m) = p.A.col(j).transpose();
    cz(r) = p.c(j);
  }
  MatrixXd H = (0.5 * p.eta) * (G.transpose() * G);
  H.diagonal().head(k).array() += 0.5;
  VectorXd g = (0.5 * p.eta) * (G.transpose() * cz);
  g.tail(m) += p.b;

  NonnegQPOptions opts;
  opts.tol = cfg.qp_tol;
  opts.max_iters = cfg.qp_max_iters;
  const NonnegQPResult res = solve_nonneg_qp(H, g, k, opts);

  BestResponse out;
  out.dual.alpha = res.u.head(k);
  out.dual.beta = res.u.tail(m);
  out.status = res.status;
  return out;
}

BestResponse best_response(const SpectralTruncation& trunc,
                           const QuadraticData& p, const SupportVector& z,
                           const BRConfig& cfg) {
  if (p.m() == 0) {
    return BestResponse{DualPoint{br_unconstrained(trunc, p, z), VectorXd(0)},
                        QPStatus::Converged};
  }
  return br_constrained(trunc, p, z, cfg);
}

BRTrace run_alternating(const SpectralTruncation& trunc, const QuadraticData& p,
                        const SupportVector& z0, const DualPoint& d0,
                        const BRConfig& cfg, const SupportSelector& select,
                        const IterateValue& value) {
  check_dimensions(trunc, p, d0);
  if (z0.size() != p.n()) throw InvalidProblem("z0 has wrong length");
  if (cfg.max_iters < 1) throw InvalidProblem("BR max_iters must be positive");

  BRTrace trace;
  trace.fresh_update = cfg.fresh_update;
  trace.iterates.push_back(BRIterate{z0, d0, value(z0, d0)});

  // The state that determines the future is z_t alone for the fresh update
  // and (z_t, alpha_t, beta_t) for the stale one. Duals produced by the same
  // support are bit-identical, so exact byte keys are sound.
  const auto state_key = [&](const BRIterate& it) {
    std::string key;
    key.reserve(static_cast<std::size_t>(it.z.size()));
    for (Index j = 0; j < it.z.size(); ++j) key.push_back(it.z[j] ? '1' : '0');
    if (!cfg.fresh_update) {
      append_bytes(key, it.dual.alpha);
      append_bytes(key, it.dual.beta);
    }
    return key;
  };
  std::unordered_map<std::string, int> seen;
  seen.emplace(state_key(trace.iterates.front()), 0);

  for (int t = 0; t < cfg.max_iters; ++t) {
    const BRIterate& cur = trace.iterates.back();
    BestResponse br = best_response(trunc, p, cur.z, cfg);
    if (!br.certified()) trace.all_best_responses_certified = false;

    const DualPoint& source = cfg.fresh_update ? br.dual : cur.dual;
    SupportVector next_z = select(gamma(trunc, p, source));
    const double v = value(next_z, br.dual);
    trace.iterates.push_back(BRIterate{std::move(next_z), std::move(br.dual), v});

    const int idx = t + 1;
    auto [pos, inserted] = seen.emplace(state_key(trace.iterates.back()), idx);
    if (!inserted) {
      trace.cycle_start = pos->second;
      trace.cycle_period = idx - pos->second;
      break;
    }
  }
  trace.converged_certificate =
      trace.cycle_period == 1 && trace.all_best_responses_certified;
  return trace;
}

BRTrace run_best_response(const SpectralTruncation& trunc, const SparseQP& p,
                          const SupportVector& z0, const BRConfig& cfg) {
  if (z0.count() > p.s) {
    throw InvalidProblem("initial support exceeds the sparsity budget");
  }
  const int s = p.s;
  return run_alternating(
      trunc, p, z0, DualPoint::zeros(trunc.k, p.m()), cfg,
      [s](const VectorXd& g) { return select_support(g, s); },
      [&](const SupportVector& z, const DualPoint& d) {
        return eval_L(trunc, p, z, d);
      });
}

SupportVector default_start(const SparseQP& p) { return select_support(p.c, p.s); }

SupportVector random_support(Index n, int s, std::uint64_t seed) {
  if (s < 0 || s > n) throw InvalidProblem("random_support: s out of range");
  std::mt19937_64 rng(seed);
  std::vector<Index> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), Index{0});
  for (int i = 0; i < s; ++i) {
    std::uniform_int_distribution<Index> pick(i, n - 1);
    std::swap(idx[static_cast<std::size_t>(i)],
              idx[static_cast<std::size_t>(pick(rng))]);
  }
  idx.resize(static_cast<std::size_t>(s));
  return SupportVector::from_indices(n, idx);
}

SupportVector screen_from_trace(const BRTrace& trace, int p_window) {
  if (trace.iterates.empty()) throw InvalidProblem("empty best-response trace");
  if (p_window < 1) throw InvalidProblem("p_window must be positive");
  const int len = static_cast<int>(trace.iterates.size());
  SupportVector Z(trace.iterates.front().z.size());
  for (int t = std::max(0, len - p_window); t < len; ++t) {
    Z |= trace.iterates[static_cast<std::size_t>(t)].z;
  }
  if (trace.cycle_start) {
    for (int t = *trace.cycle_start; t < len; ++t) {
      Z |= trace.iterates[static_cast<std::size_t>(t)].z;
    }
  }
  return Z;
}

}  // namespace pch
