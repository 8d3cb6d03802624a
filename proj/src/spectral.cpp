#include "pch/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace pch {

MatrixXd SpectralTruncation::reconstruct() const {
  return V * eigenvalues.asDiagonal() * V.transpose();
}

MatrixXd SpectralTruncation::scaled_basis() const {
  return V * sqrt_lambda.asDiagonal();
}

Spectrum SpectralTruncation::as_spectrum() const {
  return Spectrum{eigenvalues, V};
}

Spectrum eig_sym(const MatrixXd& Q) {
  const Index n = Q.rows();
  if (n == 0 || Q.cols() != n) {
    throw InvalidProblem("eig_sym requires a non-empty square matrix");
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> solver(Q);
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "symmetric eigensolver did not converge (n=" << n
        << ", ||Q||_F=" << Q.norm() << ", max|Q_ij|=" << Q.cwiseAbs().maxCoeff()
        << ")";
    throw NumericalFailure(msg.str());
  }

  Spectrum out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();

  for (Index j = 0; j < n; ++j) {
    auto col = out.eigenvectors.col(j);
    Index pivot = 0;
    double best = -1.0;
    for (Index i = 0; i < n; ++i) {
      if (std::abs(col(i)) > best) {
        best = std::abs(col(i));
        pivot = i;
      }
    }
    if (col(pivot) < 0.0) col = -col;
  }
  return out;
}

SpectralTruncation truncate(const Spectrum& spectrum, int k) {
  const Index n = spectrum.n();
  if (k < 1 || k > n) {
    throw InvalidProblem("truncation level k=" + std::to_string(k) +
                         " outside [1, " + std::to_string(n) + "]");
  }
  SpectralTruncation t;
  t.k = k;
  t.n = spectrum.eigenvectors.rows();
  t.eigenvalues = spectrum.eigenvalues.head(k);
  t.V = spectrum.eigenvectors.leftCols(k);

  const double floor = 1e-12 * std::max(spectrum.eigenvalues(0), 0.0);
  for (Index i = 0; i < k; ++i) {
    if (t.eigenvalues(i) < floor || t.eigenvalues(i) <= 0.0) {
      t.eigenvalues(i) = 0.0;
    }
  }
  t.sqrt_lambda = t.eigenvalues.cwiseSqrt();
  return t;
}

double frobenius_error(const Spectrum& spectrum, int k) {
  const Index n = spectrum.n();
  if (k < 1 || k > n) {
    throw InvalidProblem("truncation level k=" + std::to_string(k) +
                         " outside [1, " + std::to_string(n) + "]");
  }
  return spectrum.eigenvalues.tail(n - k).norm();
}

int k_hat(const Spectrum& spectrum) {
  const int n = static_cast<int>(spectrum.n());
  const double rank1 = frobenius_error(spectrum, 1);
  // Tails at round-off level count as an exact rank-one reconstruction.
  const double floor = 1e-12 * std::abs(spectrum.eigenvalues(0)) * std::sqrt(static_cast<double>(n));
  if (rank1 <= floor) return 1;
  for (int k = 1; k <= n; ++k) {
    if (frobenius_error(spectrum, k) <= 0.1 * rank1) return k;
  }
  return n;
}

std::optional<double> leading_ratio(const Spectrum& spectrum, int index) {
  if (index < 1 || spectrum.n() < index) return std::nullopt;
  const double denom = spectrum.eigenvalues(index - 1);
  if (denom <= 0.0) return std::nullopt;
  return spectrum.eigenvalues(0) / denom;
}

}  // namespace pch
