#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dissipative/core/ops.hpp"
#include "dissipative/dse/hamiltonian.hpp"

namespace dissipative::mps {

inline constexpr double kRankTol = 1e-10;

/// Translationally invariant MPS on a ring: coefficients tr(A_{i1} ... A_{iN}).
struct MatrixProductState {
  int d = 0;
  int D = 0;
  std::vector<Matrix> tensors;
  int n_sites = 0;
  std::string name;

  MatrixProductState() = default;
  MatrixProductState(std::vector<Matrix> a, int n, std::string label = "custom")
      : d(static_cast<int>(a.size())), D(a.empty() ? 0 : static_cast<int>(a.front().rows())), tensors(std::move(a)), n_sites(n),
        name(std::move(label)) {
    validate();
  }

  void validate() const {
    detail::require(d >= 2, "MPS: physical dimension must be >= 2");
    detail::require(D >= 1, "MPS: bond dimension must be >= 1");
    for (const auto& a : tensors) detail::require(a.rows() == D && a.cols() == D, "MPS: every tensor must be D x D");
    detail::require(n_sites >= 2, "MPS: need at least two sites");
  }

  SiteSystem system() const { return SiteSystem::uniform(n_sites, d); }
};

/// Spin-1 AKLT tensors, physical basis ordered m = +1, 0, -1.
inline MatrixProductState aklt(int n) {
  Matrix up = Matrix::Zero(2, 2), down = Matrix::Zero(2, 2), z = Matrix::Zero(2, 2);
  up(0, 1) = std::sqrt(2.0 / 3.0);
  down(1, 0) = -std::sqrt(2.0 / 3.0);
  z(0, 0) = -std::sqrt(1.0 / 3.0);
  z(1, 1) = std::sqrt(1.0 / 3.0);
  return MatrixProductState({up, z, down}, n, "aklt");
}

/// A_0 = |0><0|, A_1 = |1><1|.
inline MatrixProductState ghz(int n) {
  Matrix a0 = Matrix::Zero(2, 2), a1 = Matrix::Zero(2, 2);
  a0(0, 0) = 1.0;
  a1(1, 1) = 1.0;
  return MatrixProductState({a0, a1}, n, "ghz");
}

/// A_0 = 1, A_1 = diag(x, 0): |0...0> + (|0> + x|1>)^N, i.e. |0...0> plus a W
/// component at first order in x. Not injective.
inline MatrixProductState w_like(int n, double x = 0.2) {
  Matrix a1 = Matrix::Zero(2, 2);
  a1(0, 0) = x;
  return MatrixProductState({Matrix::Identity(2, 2), a1}, n, "w");
}

/// Normalized coefficient vector, site 0 most significant.
inline Vector mps_to_state(const MatrixProductState& mps, std::size_t max_dim = 1u << 16) {
  mps.validate();
  const SiteSystem sys = mps.system();
  detail::require(std::pow(static_cast<double>(mps.d), mps.n_sites) <= static_cast<double>(max_dim),
                  "mps_to_state: d^N exceeds the dimension budget");
  // Contract left to right: env(i1..ik) = A_{i1} ... A_{ik}.
  std::vector<Matrix> env{Matrix::Identity(mps.D, mps.D)};
  for (int s = 0; s < mps.n_sites; ++s) {
    std::vector<Matrix> next;
    next.reserve(env.size() * static_cast<std::size_t>(mps.d));
    for (const auto& e : env)
      for (const auto& a : mps.tensors) next.push_back(e * a);
    env = std::move(next);
  }
  Vector psi(static_cast<Eigen::Index>(env.size()));
  for (std::size_t i = 0; i < env.size(); ++i) psi(static_cast<Eigen::Index>(i)) = env[i].trace();
  const double n = psi.norm();
  if (n < 1e-300) throw NumericalError("mps_to_state: contraction has zero norm");
  return psi / n;
}

/// Matrix of X ↦ Σ_ij tr[X A_i A_j] |ij>, columns indexed by vec(X).
inline Matrix two_site_map(const MatrixProductState& mps) {
  const Eigen::Index dd = mps.d, bond = mps.D;
  Matrix g(dd * dd, bond * bond);
  for (Eigen::Index i = 0; i < dd; ++i)
    for (Eigen::Index j = 0; j < dd; ++j) {
      const Matrix prod = mps.tensors[static_cast<std::size_t>(i)] * mps.tensors[static_cast<std::size_t>(j)];
      // tr[X M] = Σ_ab X_ab M_ba; vec(X) column-stacked puts X_ab at a + b D.
      for (Eigen::Index b = 0; b < bond; ++b)
        for (Eigen::Index a = 0; a < bond; ++a) g(i * dd + j, a + b * bond) = prod(b, a);
    }
  return g;
}

inline Eigen::Index numerical_rank(const Matrix& m, double tol = kRankTol) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Eigen::Index r = 0;
  while (r < s.size() && s(r) > tol * s(0)) ++r;
  return r;
}

inline bool is_injective(const MatrixProductState& mps) {
  return numerical_rank(two_site_map(mps)) == static_cast<Eigen::Index>(mps.D) * mps.D;
}

/// Projectors onto the range (P) and kernel (H = 1 - P) of a two-site reduced state.
struct PairProjectors {
  Matrix P;
  Matrix H;
};

/// Two-site reduced state of the ring, from transfer matrices:
/// ρ(ij; kl) = tr[(A_i A_j ⊗ conj(A_k A_l)) E^{N-2}] / tr E^N with E = Σ_s A_s ⊗ conj(A_s).
inline Matrix two_site_reduced(const MatrixProductState& mps) {
  mps.validate();
  const Eigen::Index dd = mps.d, bond2 = static_cast<Eigen::Index>(mps.D) * mps.D;
  Matrix e = Matrix::Zero(bond2, bond2);
  for (const auto& a : mps.tensors) e += kron(a, Matrix(a.conjugate()));
  Matrix e_rest = Matrix::Identity(bond2, bond2);
  for (int s = 0; s < mps.n_sites - 2; ++s) e_rest = e_rest * e;
  const cplx norm = (e_rest * e * e).trace();
  if (std::abs(norm) < 1e-300) throw NumericalError("two_site_reduced: contraction has zero norm");
  Matrix rho(dd * dd, dd * dd);
  for (Eigen::Index i = 0; i < dd; ++i)
    for (Eigen::Index j = 0; j < dd; ++j) {
      const Matrix x = mps.tensors[static_cast<std::size_t>(i)] * mps.tensors[static_cast<std::size_t>(j)];
      for (Eigen::Index k = 0; k < dd; ++k)
        for (Eigen::Index l = 0; l < dd; ++l) {
          const Matrix y = mps.tensors[static_cast<std::size_t>(k)] * mps.tensors[static_cast<std::size_t>(l)];
          rho(i * dd + j, k * dd + l) = (kron(x, Matrix(y.conjugate())) * e_rest).trace() / norm;
        }
    }
  return 0.5 * (rho + rho.adjoint());
}

/// P onto the range of the two-site reduced state, shared by every pair of
/// the ring. rank(P) must be D^2.
inline PairProjectors pair_projectors(const MatrixProductState& mps) {
  const Matrix reduced = two_site_reduced(mps);
  Eigen::SelfAdjointEigenSolver<Matrix> es(reduced);
  const double top = es.eigenvalues().maxCoeff();
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
    if (es.eigenvalues()(i) > kRankTol * top) keep.push_back(i);
  const auto want = static_cast<std::size_t>(mps.D) * static_cast<std::size_t>(mps.D);
  if (keep.size() != want)
    throw InputError("two_site_projectors: two-site range has rank " + std::to_string(keep.size()) + ", expected D^2 = " +
                     std::to_string(want) + " (MPS not injective)");
  Matrix v(es.eigenvectors().rows(), static_cast<Eigen::Index>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) v.col(static_cast<Eigen::Index>(c)) = es.eigenvectors().col(keep[c]);
  PairProjectors out;
  out.P = v * v.adjoint();
  out.H = Matrix::Identity(out.P.rows(), out.P.cols()) - out.P;
  return out;
}

/// Support of pair k (0-based): sites (k, k+1 mod N).
inline std::vector<int> pair_support(const MatrixProductState& mps, int k) { return {k, (k + 1) % mps.n_sites}; }

/// H_k on every nearest-neighbour pair of the ring; entry k acts on (k, k+1 mod N).
inline std::vector<LocalOperator> two_site_projectors(const MatrixProductState& mps) {
  const auto pp = pair_projectors(mps);
  std::vector<LocalOperator> out;
  for (int k = 0; k < mps.n_sites; ++k) out.emplace_back(pp.H, pair_support(mps, k), std::vector<int>{mps.d, mps.d});
  return out;
}

/// Σ_k H_k on the ring (or on the open chain when `ring` is false).
inline dse::FrustrationFreeHamiltonian parent_hamiltonian(const MatrixProductState& mps, bool ring = true) {
  auto terms = two_site_projectors(mps);
  if (!ring) terms.pop_back();
  return dse::FrustrationFreeHamiltonian(mps.system(), std::move(terms));
}

}  // namespace dissipative::mps
