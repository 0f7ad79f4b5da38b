#pragma once

#include <random>

#include <Eigen/QR>

#include "dissipative/core/operator.hpp"

namespace dissipative {

using Rng = std::mt19937_64;

inline Matrix random_ginibre(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cplx(g(rng), g(rng)) / std::sqrt(2.0);
  return m;
}

/// Haar-distributed unitary (QR of a Ginibre matrix with phase fix).
inline Matrix random_unitary(Eigen::Index n, Rng& rng) {
  Eigen::HouseholderQR<Matrix> qr(random_ginibre(n, n, rng));
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx d = r(i, i);
    q.col(i) *= d / std::abs(d);
  }
  return q;
}

inline Vector random_pure(Eigen::Index n, Rng& rng) {
  Vector v = random_ginibre(n, 1, rng);
  return v / v.norm();
}

/// Random density matrix of the given rank (full rank when rank <= 0).
inline DensityMatrix random_density(const SiteSystem& s, Rng& rng, Eigen::Index rank = 0) {
  const auto n = static_cast<Eigen::Index>(s.total_dim());
  if (rank <= 0 || rank > n) rank = n;
  const Matrix g = random_ginibre(n, rank, rng);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace();
  return DensityMatrix(Operator(rho, s), DensityMatrix::Trusted{});
}

/// Orthogonal projector of the given rank onto a Haar-random subspace.
inline Matrix random_projector(Eigen::Index n, Eigen::Index rank, Rng& rng) {
  const Matrix u = random_unitary(n, rng);
  return u.leftCols(rank) * u.leftCols(rank).adjoint();
}

inline Matrix random_hermitian(Eigen::Index n, Rng& rng) {
  const Matrix g = random_ginibre(n, n, rng);
  return 0.5 * (g + g.adjoint());
}

}  // namespace dissipative
