#include "pch/minmax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "pch/best_response.hpp"

namespace pch {

SupportVector SupportVector::from_indices(Index n, const std::vector<Index>& idx) {
  SupportVector z(n);
  for (Index j : idx) {
    if (j < 0 || j >= n) throw InvalidProblem("support index out of range");
    z.set(j);
  }
  return z;
}

SupportVector SupportVector::ones(Index n) {
  SupportVector z(n);
  std::fill(z.bits_.begin(), z.bits_.end(), std::uint8_t{1});
  return z;
}

Index SupportVector::count() const {
  return static_cast<Index>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<Index> SupportVector::indices() const {
  std::vector<Index> out;
  for (std::size_t j = 0; j < bits_.size(); ++j) {
    if (bits_[j]) out.push_back(static_cast<Index>(j));
  }
  return out;
}

VectorXd SupportVector::as_vector() const {
  VectorXd v(size());
  for (Index j = 0; j < size(); ++j) v(j) = (*this)[j] ? 1.0 : 0.0;
  return v;
}

SupportVector& SupportVector::operator|=(const SupportVector& other) {
  if (other.size() != size()) throw InvalidProblem("support size mismatch in OR");
  for (std::size_t j = 0; j < bits_.size(); ++j) bits_[j] |= other.bits_[j];
  return *this;
}

std::size_t SupportVector::hash() const {
  // FNV-1a over the bytes.
  std::size_t h = 1469598103934665603ull;
  for (auto b : bits_) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

void check_dimensions(const SpectralTruncation& trunc, const QuadraticData& p,
                      const DualPoint& d) {
  if (trunc.n != p.n()) {
    throw InvalidProblem("truncation dimension does not match problem");
  }
  if (d.alpha.size() != trunc.k) {
    throw InvalidProblem("alpha has length " + std::to_string(d.alpha.size()) +
                         ", expected k=" + std::to_string(trunc.k));
  }
  if (d.beta.size() != p.m()) {
    throw InvalidProblem("beta has length " + std::to_string(d.beta.size()) +
                         ", expected m=" + std::to_string(p.m()));
  }
}

VectorXd gamma(const SpectralTruncation& trunc, const QuadraticData& p,
               const DualPoint& d) {
  check_dimensions(trunc, p, d);
  VectorXd g = p.c + trunc.V * trunc.sqrt_lambda.cwiseProduct(d.alpha);
  if (p.m() > 0) g.noalias() += p.A.transpose() * d.beta;
  return g;
}

namespace {

double weighted_square_sum(const SupportVector& z, const VectorXd& g) {
  if (z.size() != g.size()) throw InvalidProblem("support length mismatch");
  double acc = 0.0;
  for (Index j = 0; j < g.size(); ++j) {
    if (z[j]) acc += g(j) * g(j);
  }
  return acc;
}

}  // namespace

double eval_L(const SpectralTruncation& trunc, const QuadraticData& p,
              const SupportVector& z, const DualPoint& d) {
  const VectorXd g = gamma(trunc, p, d);
  const double linear = p.m() > 0 ? d.beta.dot(p.b) : 0.0;
  return -linear - 0.25 * d.alpha.squaredNorm() -
         0.25 * p.eta * weighted_square_sum(z, g);
}

double eval_H(const SpectralTruncation& trunc, const PenalizedQP& p,
              const SupportVector& z, const DualPoint& d) {
  return p.theta * static_cast<double>(z.count()) + eval_L(trunc, p, z, d);
}

SupportVector select_support(const VectorXd& gamma_vec, int s) {
  const Index n = gamma_vec.size();
  if (s < 1 || s > n) {
    throw InvalidProblem("select_support: s=" + std::to_string(s) +
                         " outside [1, " + std::to_string(n) + "]");
  }
  std::vector<Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Index{0});
  const auto mag = [&](Index j) { return gamma_vec(j) * gamma_vec(j); };
  std::partial_sort(order.begin(), order.begin() + s, order.end(),
                    [&](Index a, Index b) {
                      const double ma = mag(a), mb = mag(b);
                      if (ma != mb) return ma > mb;
                      return a < b;
                    });
  SupportVector z(n);
  for (int i = 0; i < s; ++i) z.set(order[static_cast<std::size_t>(i)]);
  return z;
}

SupportVector select_support_penalized(const VectorXd& gamma_vec, double eta,
                                       double theta) {
  SupportVector z(gamma_vec.size());
  for (Index j = 0; j < gamma_vec.size(); ++j) {
    if (0.25 * eta * gamma_vec(j) * gamma_vec(j) > theta) z.set(j);
  }
  return z;
}

double primal_value_k(const SpectralTruncation& trunc, const QuadraticData& p,
                      const SupportVector& z) {
  if (p.m() == 0) {
    DualPoint d{br_unconstrained(trunc, p, z), VectorXd(0)};
    return eval_L(trunc, p, z, d);
  }
  const BestResponse br = br_constrained(trunc, p, z, BRConfig{});
  if (br.status == QPStatus::Unbounded) {
    return std::numeric_limits<double>::infinity();
  }
  if (br.status != QPStatus::Converged) {
    throw NumericalFailure("primal_value_k: constrained best response did not "
                           "reach tolerance");
  }
  return eval_L(trunc, p, z, br.dual);
}

}  // namespace pch
