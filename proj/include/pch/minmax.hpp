#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "pch/core_model.hpp"
#include "pch/spectral.hpp"

namespace pch {

/// Dual variables of the min-max problem: alpha (length k, free) and beta
/// (length m, nonnegative).
struct DualPoint {
  VectorXd alpha;
  VectorXd beta;

  static DualPoint zeros(Index k, Index m) {
    return DualPoint{VectorXd::Zero(k), VectorXd::Zero(m)};
  }
};

/// Binary indicator vector z in {0,1}^n.
class SupportVector {
 public:
  SupportVector() = default;
  explicit SupportVector(Index n) : bits_(static_cast<std::size_t>(n), 0) {}
  static SupportVector from_indices(Index n, const std::vector<Index>& idx);
  static SupportVector ones(Index n);

  Index size() const { return static_cast<Index>(bits_.size()); }
  Index count() const;
  bool operator[](Index j) const { return bits_[static_cast<std::size_t>(j)] != 0; }
  void set(Index j, bool on = true) { bits_[static_cast<std::size_t>(j)] = on ? 1 : 0; }

  std::vector<Index> indices() const;
  VectorXd as_vector() const;

  SupportVector& operator|=(const SupportVector& other);
  friend SupportVector operator|(SupportVector a, const SupportVector& b) {
    a |= b;
    return a;
  }
  friend bool operator==(const SupportVector&, const SupportVector&) = default;
  friend bool operator<(const SupportVector& a, const SupportVector& b) {
    return a.bits_ < b.bits_;
  }

  std::size_t hash() const;

 private:
  std::vector<std::uint8_t> bits_;
};

struct SupportHash {
  std::size_t operator()(const SupportVector& z) const { return z.hash(); }
};

/// gamma = c + V sqrt(Lambda) alpha + A^T beta
VectorXd gamma(const SpectralTruncation& trunc, const QuadraticData& p,
               const DualPoint& d);

/// L(z, alpha, beta) = -beta^T b - |alpha|^2 / 4 - (eta/4) sum_j z_j gamma_j^2
double eval_L(const SpectralTruncation& trunc, const QuadraticData& p,
              const SupportVector& z, const DualPoint& d);

/// H(z, alpha, beta) = theta sum_j z_j + L(z, alpha, beta)
double eval_H(const SpectralTruncation& trunc, const PenalizedQP& p,
              const SupportVector& z, const DualPoint& d);

/// Minimizer of L over {z : sum z <= s}: ones at the s largest gamma_j^2,
/// lower index first among equal magnitudes. Always exactly s ones.
SupportVector select_support(const VectorXd& gamma_vec, int s);

/// Minimizer of H over {0,1}^n: z_j = 1 iff (eta/4) gamma_j^2 > theta.
SupportVector select_support_penalized(const VectorXd& gamma_vec, double eta,
                                       double theta);

/// max over (alpha, beta >= 0) of L(z, ., .): the level-k objective of the
/// fixed support z. Returns +inf when the dual is unbounded (the restricted
/// primal is infeasible). Throws NumericalFailure if the constrained solve
/// hits its iteration cap.
double primal_value_k(const SpectralTruncation& trunc, const QuadraticData& p,
                      const SupportVector& z);

/// Checks dimension consistency of (trunc, p, d); throws InvalidProblem.
void check_dimensions(const SpectralTruncation& trunc, const QuadraticData& p,
                      const DualPoint& d);

}  // namespace pch
