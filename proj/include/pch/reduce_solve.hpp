#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "pch/minmax.hpp"

namespace pch {

struct ReducedProblem {
  SparseQP parent;
  SupportVector Z;
  double M = 1.0;
  std::vector<Index> candidate_indices;

  static ReducedProblem make(const SparseQP& parent, SupportVector Z, double M);
};

struct SparseSolution {
  VectorXd x;
  std::vector<Index> support;
  double objective = 0.0;
  bool exact = false;
  std::optional<double> big_m;
  bool big_m_binding = false;
  std::uint64_t subsets_evaluated = 0;
};

struct RestrictedSolution {
  VectorXd x;
  double value = 0.0;  // +inf when the restricted constraints are infeasible
};

struct EnumerationOptions {
  std::uint64_t cap = 1'000'000;
  // 0: read PCH_THREADS, else hardware concurrency.
  unsigned threads = 0;
};

/// minimize c^T x + x^T Q x + |x|^2/eta with x_j = 0 off `support` and
/// Ax <= b. Closed-form Cholesky solve when m == 0; otherwise projected
/// gradient on the multiplier dual with the primal recovered in closed form.
RestrictedSolution restricted_qp(const QuadraticData& p,
                                 const std::vector<Index>& support);

/// 4 * ||x_T||_inf for the restricted solution on support(z_T); 1 if zero.
double compute_big_m(const SparseQP& p, const SupportVector& z_T);

/// Exact minimum over subsets of the candidates: supports of size
/// min(s, |Z|), plus every smaller size when linear constraints are present.
/// Throws NumericalFailure when the subset count exceeds the cap or every
/// subset is infeasible.
SparseSolution solve_reduced(const ReducedProblem& rp, int s,
                             const EnumerationOptions& opts = {});

/// Global optimum by enumeration over all of [n].
SparseSolution solve_exact(const SparseQP& p, const EnumerationOptions& opts = {});

/// n choose k, saturating at UINT64_MAX.
std::uint64_t binomial(std::uint64_t n, std::uint64_t k);

/// Thread count from PCH_THREADS, else std::thread::hardware_concurrency().
unsigned default_threads();

}  // namespace pch
