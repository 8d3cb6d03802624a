#include "pch/reduce_solve.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>

#include "pch/nonneg_qp.hpp"

namespace pch {

ReducedProblem ReducedProblem::make(const SparseQP& parent, SupportVector Z,
                                    double M) {
  if (Z.size() != parent.n()) throw InvalidProblem("Z has wrong length");
  if (Z.count() < 1) throw InvalidProblem("reduced problem needs ||Z||_0 >= 1");
  if (!(M > 0.0)) throw InvalidProblem("big-M must be positive");
  ReducedProblem rp;
  rp.parent = parent;
  rp.candidate_indices = Z.indices();
  rp.Z = std::move(Z);
  rp.M = M;
  return rp;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    const std::uint64_t num = n - k + i;
    // r * num / i is exact at every step; guard the multiplication.
    if (r > std::numeric_limits<std::uint64_t>::max() / num) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    r = r * num / i;
  }
  return r;
}

unsigned default_threads() {
  if (const char* env = std::getenv("PCH_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RestrictedSolution restricted_qp(const QuadraticData& p,
                                 const std::vector<Index>& support) {
  const Index n = p.n();
  RestrictedSolution out;
  out.x = VectorXd::Zero(n);
  if (support.empty()) {
    out.value = satisfies_constraints(p, out.x, 0.0)
                    ? 0.0
                    : std::numeric_limits<double>::infinity();
    return out;
  }
  const Index r = static_cast<Index>(support.size());
  MatrixXd P(r, r);
  VectorXd cs(r);
  for (Index a = 0; a < r; ++a) {
    const Index ja = support[static_cast<std::size_t>(a)];
    if (ja < 0 || ja >= n) throw InvalidProblem("support index out of range");
    cs(a) = p.c(ja);
    for (Index b = 0; b < r; ++b) P(a, b) = p.Q(ja, support[static_cast<std::size_t>(b)]);
  }
  P.diagonal().array() += 1.0 / p.eta;
  Eigen::LLT<MatrixXd> llt(P);
  if (llt.info() != Eigen::Success) {
    throw NumericalFailure("restricted QP matrix is not positive definite");
  }

  VectorXd xs;
  if (p.m() == 0) {
    xs = -0.5 * llt.solve(cs);
  } else {
    // Dual of the restricted problem over multipliers mu >= 0:
    //   minimize 0.5 mu^T (0.5 A_S P^-1 A_S^T) mu + (b + 0.5 A_S P^-1 c_S)^T mu
    // with x_S(mu) = -0.5 P^-1 (c_S + A_S^T mu).
    MatrixXd As(p.m(), r);
    for (Index a = 0; a < r; ++a) As.col(a) = p.A.col(support[static_cast<std::size_t>(a)]);
    const MatrixXd PinvAt = llt.solve(As.transpose());
    const MatrixXd H = 0.5 * (As * PinvAt);
    const VectorXd g = p.b + 0.5 * (As * llt.solve(cs));
    const NonnegQPResult dual = solve_nonneg_qp(0.5 * (H + H.transpose()), g, 0);
    if (dual.status == QPStatus::Unbounded) {
      out.value = std::numeric_limits<double>::infinity();
      return out;
    }
    xs = -0.5 * llt.solve(cs + As.transpose() * dual.u);
  }
  for (Index a = 0; a < r; ++a) out.x(support[static_cast<std::size_t>(a)]) = xs(a);

  const double slack_tol = 1e-7 * (1.0 + (p.m() > 0 ? p.b.cwiseAbs().maxCoeff() : 0.0));
  if (!satisfies_constraints(p, out.x, slack_tol)) {
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.value = objective(p, out.x);
  return out;
}

double compute_big_m(const SparseQP& p, const SupportVector& z_T) {
  if (z_T.size() != p.n()) throw InvalidProblem("z_T has wrong length");
  const RestrictedSolution sol = restricted_qp(p, z_T.indices());
  if (!std::isfinite(sol.value)) {
    throw NumericalFailure("big-M: restricted problem on z_T is infeasible");
  }
  const double norm = sol.x.size() > 0 ? sol.x.cwiseAbs().maxCoeff() : 0.0;
  return norm > 0.0 ? 4.0 * norm : 1.0;
}

namespace {

struct Candidate {
  double value = std::numeric_limits<double>::infinity();
  std::vector<Index> support;
  VectorXd x;
  std::uint64_t evaluated = 0;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.value != b.value) return a.value < b.value;
  return a.support < b.support;
}

// Visits every size-r subset of `pool` in lexicographic order; the visitor
// receives the running ordinal so work can be striped across threads.
template <typename Visit>
void for_each_combination(const std::vector<Index>& pool, std::size_t r, Visit&& visit) {
  const std::size_t n = pool.size();
  if (r > n) return;
  std::vector<std::size_t> pos(r);
  for (std::size_t i = 0; i < r; ++i) pos[i] = i;
  std::vector<Index> subset(r);
  std::uint64_t ordinal = 0;
  while (true) {
    for (std::size_t i = 0; i < r; ++i) subset[i] = pool[pos[i]];
    visit(ordinal++, subset);
    if (r == 0) return;
    std::size_t i = r;
    while (i > 0 && pos[i - 1] == n - r + (i - 1)) --i;
    if (i == 0) return;
    ++pos[i - 1];
    for (std::size_t j = i; j < r; ++j) pos[j] = pos[j - 1] + 1;
  }
}

}  // namespace

SparseSolution solve_reduced(const ReducedProblem& rp, int s,
                             const EnumerationOptions& opts) {
  const SparseQP& p = rp.parent;
  if (s < 1) throw InvalidProblem("solve_reduced: s must be positive");
  const std::size_t pool = rp.candidate_indices.size();
  const std::size_t top = std::min<std::size_t>(static_cast<std::size_t>(s), pool);
  // Without constraints, enlarging a support never hurts, so only the largest
  // size matters.
  const std::size_t bottom = p.m() == 0 ? top : 1;

  std::uint64_t total = 0;
  for (std::size_t r = bottom; r <= top; ++r) {
    const std::uint64_t c = binomial(pool, r);
    total = (c > opts.cap || total > opts.cap - c) ? opts.cap + 1 : total + c;
  }
  if (total > opts.cap) {
    throw NumericalFailure(
        "exact enumeration needs more than " + std::to_string(opts.cap) +
        " subsets (|Z|=" + std::to_string(pool) + ", s=" + std::to_string(s) +
        "); shrink Z with a longer screening run or use a greedy fallback");
  }

  const unsigned threads = std::max<unsigned>(
      1, std::min<std::uint64_t>(opts.threads ? opts.threads : default_threads(),
                                 total / 256 + 1));
  std::vector<Candidate> partial(threads);
  const auto worker = [&](unsigned tid) {
    Candidate& best = partial[tid];
    for (std::size_t r = bottom; r <= top; ++r) {
      for_each_combination(rp.candidate_indices, r,
                           [&](std::uint64_t ordinal, const std::vector<Index>& subset) {
                             if (ordinal % threads != tid) return;
                             RestrictedSolution sol = restricted_qp(p, subset);
                             ++best.evaluated;
                             Candidate cand{sol.value, subset, {}, 0};
                             if (better(cand, best)) {
                               best.value = sol.value;
                               best.support = subset;
                               best.x = std::move(sol.x);
                             }
                           });
    }
  };
  if (threads == 1) {
    worker(0);
  } else {
    std::vector<std::jthread> pool_threads;
    for (unsigned t = 0; t < threads; ++t) pool_threads.emplace_back(worker, t);
  }

  Candidate best;
  std::uint64_t evaluated = 0;
  for (auto& c : partial) {
    evaluated += c.evaluated;
    if (better(c, best)) best = std::move(c);
  }
  if (!std::isfinite(best.value)) {
    throw NumericalFailure("every candidate support is infeasible for Ax <= b");
  }

  SparseSolution out;
  out.x = std::move(best.x);
  out.support = std::move(best.support);
  out.objective = objective(p, out.x);
  out.exact = true;
  out.subsets_evaluated = evaluated;
  if (std::isfinite(rp.M)) {
    out.big_m = rp.M;
    out.big_m_binding = out.x.cwiseAbs().maxCoeff() >= rp.M;
  }
  return out;
}

SparseSolution solve_exact(const SparseQP& p, const EnumerationOptions& opts) {
  const ReducedProblem rp = ReducedProblem::make(
      p, SupportVector::ones(p.n()), std::numeric_limits<double>::infinity());
  return solve_reduced(rp, p.s, opts);
}

}  // namespace pch
