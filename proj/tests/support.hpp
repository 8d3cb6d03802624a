#pragma once

// Random instance generators and brute-force oracles shared by the unit and
// acceptance tests. The oracles deliberately avoid the library's solvers.

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <vector>

#include "pch/core_model.hpp"
#include "pch/minmax.hpp"
#include "pch/spectral.hpp"

namespace pch::testing {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) {
  return std::uniform_int_distribution<int>(lo, hi)(rng);
}

inline VectorXd random_vector(Rng& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  VectorXd v(n);
  for (Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

inline MatrixXd random_matrix(Rng& rng, Index rows, Index cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  MatrixXd M(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) M(i, j) = g(rng);
  return M;
}

/// B^T B / r with B of size r x n; rank min(r, n).
inline MatrixXd random_psd(Rng& rng, Index n, Index r) {
  const MatrixXd B = random_matrix(rng, r, n);
  MatrixXd Q = B.transpose() * B / static_cast<double>(r);
  return 0.5 * (Q + Q.transpose());
}

inline SparseQP random_problem(Rng& rng, Index n, int s, double eta, Index m = 0) {
  const Index r = uniform_int(rng, 1, static_cast<int>(n) + 2);
  MatrixXd A = m > 0 ? random_matrix(rng, m, n) : MatrixXd(0, n);
  VectorXd b(m);
  for (Index i = 0; i < m; ++i) b(i) = uniform(rng, 0.1, 1.5);
  return build_problem(random_psd(rng, n, r), random_vector(rng, n, 2.0), A, b, s, eta);
}

inline SupportVector from_mask(std::uint64_t mask, Index n) {
  SupportVector z(n);
  for (Index j = 0; j < n; ++j)
    if (mask >> j & 1U) z.set(j, true);
  return z;
}

inline std::vector<Index> mask_indices(std::uint64_t mask, Index n) {
  std::vector<Index> out;
  for (Index j = 0; j < n; ++j)
    if (mask >> j & 1U) out.push_back(j);
  return out;
}

inline int popcount(std::uint64_t mask) { return __builtin_popcountll(mask); }

/// Term-by-term evaluation of
///   L = -beta^T b - |alpha|^2/4 - (eta/4) sum_j z_j gamma_j^2.
inline double naive_L(const MatrixXd& V, const VectorXd& lambda, const QuadraticData& p,
                      const SupportVector& z, const VectorXd& alpha, const VectorXd& beta) {
  const Index n = p.n();
  double value = 0.0;
  for (Index i = 0; i < beta.size(); ++i) value -= beta(i) * p.b(i);
  for (Index i = 0; i < alpha.size(); ++i) value -= 0.25 * alpha(i) * alpha(i);
  for (Index j = 0; j < n; ++j) {
    if (!z[j]) continue;
    double g = p.c(j);
    for (Index i = 0; i < alpha.size(); ++i) g += V(j, i) * std::sqrt(lambda(i)) * alpha(i);
    for (Index i = 0; i < beta.size(); ++i) g += p.A(i, j) * beta(i);
    value -= 0.25 * p.eta * g * g;
  }
  return value;
}

/// min c^T x + x^T Q x + |x|^2/eta over x supported on S, no constraints:
/// stationarity 2 (Q_SS + I/eta) x_S = -c_S solved by full-pivot LU.
inline double oracle_restricted(const MatrixXd& Q, const VectorXd& c, double eta,
                                const std::vector<Index>& S, VectorXd* x_out = nullptr) {
  const Index n = Q.rows();
  VectorXd x = VectorXd::Zero(n);
  if (!S.empty()) {
    const Index k = static_cast<Index>(S.size());
    MatrixXd H(k, k);
    VectorXd rhs(k);
    for (Index a = 0; a < k; ++a) {
      rhs(a) = -c(S[a]);
      for (Index b = 0; b < k; ++b) H(a, b) = 2.0 * (Q(S[a], S[b]) + (a == b ? 1.0 / eta : 0.0));
    }
    const VectorXd xs = H.fullPivLu().solve(rhs);
    for (Index a = 0; a < k; ++a) x(S[a]) = xs(a);
  }
  if (x_out) *x_out = x;
  return c.dot(x) + x.dot(Q * x) + x.squaredNorm() / eta;
}

/// Same restricted problem with A x <= b by enumeration of active sets: for
/// each subset W of the constraints, solve the equality-constrained KKT system
/// and accept it when primal feasible and the multipliers are nonnegative.
/// +inf when no active set qualifies (infeasible).
inline double oracle_restricted_constrained(const QuadraticData& p, const MatrixXd& Q,
                                            const std::vector<Index>& S,
                                            VectorXd* x_out = nullptr) {
  const Index n = p.n(), m = p.m();
  if (m == 0) return oracle_restricted(Q, p.c, p.eta, S, x_out);
  const Index k = static_cast<Index>(S.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t W = 0; W < (std::uint64_t{1} << m); ++W) {
    const std::vector<Index> act = mask_indices(W, m);
    const Index w = static_cast<Index>(act.size());
    MatrixXd K = MatrixXd::Zero(k + w, k + w);
    VectorXd rhs = VectorXd::Zero(k + w);
    for (Index a = 0; a < k; ++a) {
      rhs(a) = -p.c(S[a]);
      for (Index b = 0; b < k; ++b) K(a, b) = 2.0 * (Q(S[a], S[b]) + (a == b ? 1.0 / p.eta : 0.0));
      for (Index r = 0; r < w; ++r) {
        K(a, k + r) = p.A(act[r], S[a]);
        K(k + r, a) = p.A(act[r], S[a]);
      }
    }
    for (Index r = 0; r < w; ++r) rhs(k + r) = p.b(act[r]);
    Eigen::FullPivLU<MatrixXd> lu(K);
    if (lu.rank() < k + w) continue;
    const VectorXd sol = lu.solve(rhs);
    if ((K * sol - rhs).norm() > 1e-8 * (1.0 + rhs.norm())) continue;
    bool ok = true;
    for (Index r = 0; r < w; ++r) ok = ok && sol(k + r) >= -1e-9;
    VectorXd x = VectorXd::Zero(n);
    for (Index a = 0; a < k; ++a) x(S[a]) = sol(a);
    const VectorXd Ax = p.A * x;
    for (Index i = 0; i < m; ++i) ok = ok && Ax(i) <= p.b(i) + 1e-8;
    if (!ok) continue;
    const double v = p.c.dot(x) + x.dot(Q * x) + x.squaredNorm() / p.eta;
    if (v < best) {
      best = v;
      if (x_out) *x_out = x;
    }
  }
  return best;
}

struct BruteForce {
  double value = std::numeric_limits<double>::infinity();
  std::uint64_t mask = 0;
};

/// J*_k: min over supports with |S| <= s of the restricted problem on Q_k.
/// Ties keep the first mask encountered in increasing mask order.
inline BruteForce brute_force_level(const QuadraticData& p, const MatrixXd& Qk, int s) {
  BruteForce best;
  const Index n = p.n();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (popcount(mask) > s) continue;
    const double v = oracle_restricted_constrained(p, Qk, mask_indices(mask, n));
    if (v < best.value - 1e-12 * (1.0 + std::abs(v))) {
      best.value = v;
      best.mask = mask;
    }
  }
  return best;
}

/// Every support attaining the level-k optimum within a relative tolerance.
inline std::vector<std::uint64_t> level_argmins(const QuadraticData& p, const MatrixXd& Qk,
                                                int s, double rel_tol) {
  const double best = brute_force_level(p, Qk, s).value;
  std::vector<std::uint64_t> out;
  const Index n = p.n();
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (popcount(mask) > s) continue;
    const double v = oracle_restricted_constrained(p, Qk, mask_indices(mask, n));
    if (v <= best + rel_tol * (1.0 + std::abs(best))) out.push_back(mask);
  }
  return out;
}

inline std::uint64_t to_mask(const SupportVector& z) {
  std::uint64_t mask = 0;
  for (Index j = 0; j < z.size(); ++j)
    if (z[j]) mask |= std::uint64_t{1} << j;
  return mask;
}

inline double rel_diff(double a, double b) {
  return std::abs(a - b) / std::max(1.0, std::max(std::abs(a), std::abs(b)));
}

}  // namespace pch::testing
