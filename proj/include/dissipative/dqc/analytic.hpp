#pragma once

#include <vector>

#include <Eigen/Eigenvalues>

#include "dissipative/core/types.hpp"

namespace dissipative::dqc {

/// Hamming weights of the two logical bit strings labelling a block.
struct BlockSpec {
  int lambda_i = 0;
  int lambda_j = 0;
  int depth = 1;
};

/// (T+1)x(T+1) tridiagonal block: diagonal -(1+λi+λj), -2, ..., -2, -1 and
/// unit hopping.
inline RealMatrix tridiagonal_block(const BlockSpec& s) {
  detail::require(s.lambda_i >= 0 && s.lambda_j >= 0, "BlockSpec: negative Hamming weight");
  detail::require(s.depth >= 1, "BlockSpec: depth must be >= 1");
  const int n = s.depth + 1;
  RealMatrix m = RealMatrix::Zero(n, n);
  for (int t = 0; t < n; ++t) {
    m(t, t) = t == 0 ? -(1.0 + s.lambda_i + s.lambda_j) : (t == s.depth ? -1.0 : -2.0);
    if (t + 1 < n) m(t, t + 1) = m(t + 1, t) = 1.0;
  }
  return m;
}

/// Eigenvalues of the tridiagonal block, ascending.
inline std::vector<double> analytic_block_eigenvalues(const BlockSpec& s) {
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(tridiagonal_block(s), Eigen::EigenvaluesOnly);
  const RealVector& ev = es.eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

/// Scalar blocks -2, -1-λi, -1-λj.
inline std::vector<double> analytic_scalar_eigenvalues(const BlockSpec& s) {
  return {-2.0, -1.0 - s.lambda_i, -1.0 - s.lambda_j};
}

inline std::vector<cplx> eigenvalues_2x2(double a, double b, double c, double d) {
  // x^2 - (a+d) x + (ad - bc)
  const cplx tr = a + d, det = a * d - b * c;
  const cplx root = std::sqrt(tr * tr - 4.0 * det);
  return {(tr + root) / 2.0, (tr - root) / 2.0};
}

/// 2x2 blocks [[-1-λi, 1], [1, -1-λj]] and [[-2, 1], [2, -2]].
inline std::vector<cplx> analytic_pair_eigenvalues(const BlockSpec& s) {
  auto out = eigenvalues_2x2(-1.0 - s.lambda_i, 1.0, 1.0, -1.0 - s.lambda_j);
  const auto second = eigenvalues_2x2(-2.0, 1.0, 2.0, -2.0);
  out.insert(out.end(), second.begin(), second.end());
  return out;
}

}  // namespace dissipative::dqc
