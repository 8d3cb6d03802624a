#pragma once

#include <optional>

#include "pch/core_model.hpp"

namespace pch {

/// Full symmetric eigendecomposition, eigenvalues in descending order.
/// Columns of `eigenvectors` are orthonormal; each column's largest-magnitude
/// entry is positive (lowest index wins on ties).
struct Spectrum {
  VectorXd eigenvalues;
  MatrixXd eigenvectors;

  Index n() const { return eigenvalues.size(); }
};

/// Rank-k slice of a spectrum: the level of the hierarchy.
struct SpectralTruncation {
  VectorXd eigenvalues;  // descending, clamped at zero
  MatrixXd V;            // n x k
  VectorXd sqrt_lambda;
  int k = 0;
  Index n = 0;

  /// V diag(lambda) V^T
  MatrixXd reconstruct() const;
  /// V diag(sqrt(lambda)), the n x k factor with Q_k = F F^T.
  MatrixXd scaled_basis() const;
  Spectrum as_spectrum() const;
};

Spectrum eig_sym(const MatrixXd& Q);

/// Top-k slice of `spectrum`. Eigenvalues below 1e-12 * lambda_1 are set to 0.
SpectralTruncation truncate(const Spectrum& spectrum, int k);

/// ||Q_k - Q||_F = sqrt(sum_{i>k} lambda_i^2).
double frobenius_error(const Spectrum& spectrum, int k);

/// Smallest k with frobenius_error(k) <= 0.1 * frobenius_error(1); 1 when the
/// rank-1 error is already zero.
int k_hat(const Spectrum& spectrum);

/// lambda_1 / lambda_10, or nullopt when n < 10 or lambda_10 == 0.
std::optional<double> leading_ratio(const Spectrum& spectrum, int index = 10);

}  // namespace pch
