#pragma once

#include <algorithm>
#include <complex>
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include "dissipative/liouville/superoperator.hpp"

namespace dissipative {

inline constexpr double kZeroEigenvalueTol = 1e-9;

/// Strongly connected components of the sparsity graph of a square matrix
/// (edge j -> i whenever m(i, j) != 0). Components are listed in topological
/// order: every entry m(i, j) with i, j in different components has the
/// component of j earlier than that of i. Permuting to this order makes the
/// matrix block lower-triangular, so its spectrum is the union of the
/// spectra of the diagonal blocks.
inline std::vector<std::vector<Eigen::Index>> block_components(const Matrix& m) {
  const Eigen::Index n = m.rows();
  std::vector<std::vector<Eigen::Index>> succ(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      if (i != j && m(i, j) != cplx{}) succ[static_cast<std::size_t>(j)].push_back(i);

  // Iterative Tarjan.
  constexpr Eigen::Index kUnvisited = -1;
  std::vector<Eigen::Index> index(static_cast<std::size_t>(n), kUnvisited), low(static_cast<std::size_t>(n), 0);
  std::vector<char> on_stack(static_cast<std::size_t>(n), 0);
  std::vector<Eigen::Index> stack;
  std::vector<std::vector<Eigen::Index>> comps;
  Eigen::Index counter = 0;
  struct Frame {
    Eigen::Index v;
    std::size_t next;
  };
  std::vector<Frame> call;
  for (Eigen::Index root = 0; root < n; ++root) {
    if (index[static_cast<std::size_t>(root)] != kUnvisited) continue;
    call.push_back({root, 0});
    while (!call.empty()) {
      Frame& f = call.back();
      const auto v = static_cast<std::size_t>(f.v);
      if (f.next == 0 && index[v] == kUnvisited) {
        index[v] = low[v] = counter++;
        stack.push_back(f.v);
        on_stack[v] = 1;
      }
      if (f.next < succ[v].size()) {
        const auto w = static_cast<std::size_t>(succ[v][f.next++]);
        if (index[w] == kUnvisited) {
          call.push_back({static_cast<Eigen::Index>(w), 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        std::vector<Eigen::Index> comp;
        Eigen::Index w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[static_cast<std::size_t>(w)] = 0;
          comp.push_back(w);
        } while (w != f.v);
        std::sort(comp.begin(), comp.end());
        comps.push_back(std::move(comp));
      }
      const Eigen::Index done = f.v;
      call.pop_back();
      if (!call.empty()) {
        const auto p = static_cast<std::size_t>(call.back().v);
        low[p] = std::min(low[p], low[static_cast<std::size_t>(done)]);
      }
    }
  }
  // Tarjan emits sinks first.
  std::reverse(comps.begin(), comps.end());
  return comps;
}

namespace detail {
inline Matrix submatrix(const Matrix& m, const std::vector<Eigen::Index>& rows, const std::vector<Eigen::Index>& cols) {
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j)
    for (std::size_t i = 0; i < rows.size(); ++i)
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(rows[i], cols[j]);
  return out;
}
}  // namespace detail

/// All eigenvalues of a square matrix, computed block by block.
inline std::vector<cplx> eigenvalues(const Matrix& m) {
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(m.rows()));
  for (const auto& comp : block_components(m)) {
    if (comp.size() == 1) {
      out.push_back(m(comp[0], comp[0]));
      continue;
    }
    Eigen::ComplexEigenSolver<Matrix> es(detail::submatrix(m, comp, comp), false);
    if (es.info() != Eigen::Success) throw NumericalError("eigenvalue solver did not converge");
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  }
  return out;
}

/// Eigenvalues sorted by decreasing real part, ties by imaginary part.
inline std::vector<cplx> sorted_eigenvalues(const Matrix& m) {
  auto ev = eigenvalues(m);
  std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.real() != b.real() ? a.real() > b.real() : a.imag() > b.imag(); });
  return ev;
}

struct SpectrumReport {
  std::vector<cplx> eigenvalues;  // sorted by decreasing real part
  double gap = 0.0;               // min |Re λ| over eigenvalues with |λ| > zero_tol; 0 when none
  int steady_dim = 0;             // number of eigenvalues with |λ| <= zero_tol
  double max_real_part = 0.0;
};

inline SpectrumReport spectral_gap(const Superoperator& sop, double zero_tol = kZeroEigenvalueTol) {
  SpectrumReport rep;
  rep.eigenvalues = sorted_eigenvalues(sop.matrix());
  rep.max_real_part = -std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  for (const cplx& l : rep.eigenvalues) {
    rep.max_real_part = std::max(rep.max_real_part, l.real());
    if (std::abs(l) <= zero_tol) {
      ++rep.steady_dim;
    } else {
      gap = std::min(gap, std::abs(l.real()));
    }
  }
  rep.gap = std::isfinite(gap) ? gap : 0.0;
  return rep;
}

/// Orthonormal basis (columns) of the right kernel of a square matrix. Solves
/// block by block in topological order, so only the diagonal blocks that are
/// singular pay for an SVD.
inline Matrix kernel_basis(const Matrix& m, double zero_tol = kZeroEigenvalueTol) {
  const Eigen::Index n = m.rows();
  Matrix basis(n, 0);
  std::vector<Eigen::Index> done;
  const double scale = std::max(1.0, detail::max_abs(m));
  for (const auto& comp : block_components(m)) {
    const auto ni = static_cast<Eigen::Index>(comp.size());
    const Matrix d = detail::submatrix(m, comp, comp);
    const Eigen::Index k = basis.cols();
    // Coupling of this block's rows to the already-solved coordinates.
    Matrix coupling = Matrix::Zero(ni, k);
    if (k > 0 && !done.empty()) {
      const Matrix rows = detail::submatrix(m, comp, done);
      Matrix vdone(static_cast<Eigen::Index>(done.size()), k);
      for (std::size_t i = 0; i < done.size(); ++i) vdone.row(static_cast<Eigen::Index>(i)) = basis.row(done[i]);
      coupling = rows * vdone;
    }
    Eigen::PartialPivLU<Matrix> lu(d);
    if (lu.rcond() > 1e-10) {
      if (k > 0) {
        const Matrix x = -lu.solve(coupling);
        for (Eigen::Index i = 0; i < ni; ++i) basis.row(comp[static_cast<std::size_t>(i)]) = x.row(i);
      }
    } else {
      Matrix aug(ni, ni + k);
      aug << d, coupling;
      Eigen::BDCSVD<Matrix> svd(aug, Eigen::ComputeFullV);
      const auto& s = svd.singularValues();
      const double cut = zero_tol * std::max(scale, s.size() ? s(0) : 0.0);
      Eigen::Index rank = 0;
      while (rank < s.size() && s(rank) > cut) ++rank;
      const Matrix null = svd.matrixV().rightCols(ni + k - rank);
      Matrix next = Matrix::Zero(n, null.cols());
      if (k > 0) next = basis * null.bottomRows(k);
      for (Eigen::Index i = 0; i < ni; ++i) next.row(comp[static_cast<std::size_t>(i)]) = null.row(i);
      basis = std::move(next);
    }
    done.insert(done.end(), comp.begin(), comp.end());
  }
  if (basis.cols() == 0) return basis;
  Eigen::HouseholderQR<Matrix> qr(basis);
  return qr.householderQ() * Matrix::Identity(n, basis.cols());
}

/// Kernel of a generator: an orthonormal basis of operators plus the density
/// matrices that can be formed from it.
struct SteadySpace {
  int dim = 0;
  std::vector<Matrix> basis;
  std::vector<DensityMatrix> states;
};

namespace detail {
/// Hermitian operators spanning (over the reals) the same complex space,
/// orthonormal in the Hilbert-Schmidt inner product.
inline std::vector<Matrix> hermitian_span(const std::vector<Matrix>& ops, double tol) {
  std::vector<Matrix> cand;
  for (const auto& x : ops) {
    cand.push_back(0.5 * (x + x.adjoint()));
    cand.push_back(-0.5 * kI * (x - x.adjoint()));
  }
  // Real Gram-Schmidt on Hermitian matrices (inner product Re tr(A B)).
  std::vector<Matrix> out;
  for (auto c : cand) {
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& o : out) c -= (o.conjugate().cwiseProduct(c)).sum().real() * o;
    const double nrm = c.norm();
    if (nrm > tol) out.push_back(c / nrm);
    if (static_cast<Eigen::Index>(out.size()) >= static_cast<Eigen::Index>(ops.size()) * 2) break;
  }
  return out;
}
}  // namespace detail

inline SteadySpace steady_space(const Superoperator& sop, double zero_tol = kZeroEigenvalueTol) {
  const Matrix k = kernel_basis(sop.matrix(), zero_tol);
  SteadySpace out;
  out.dim = static_cast<int>(k.cols());
  const Eigen::Index d = sop.hilbert_dim();
  for (Eigen::Index c = 0; c < k.cols(); ++c) out.basis.push_back(unvec(k.col(c), d));
  for (const auto& h : detail::hermitian_span(out.basis, 1e-8)) {
    const double tr = h.trace().real();
    if (std::abs(tr) < 1e-8) continue;
    const Matrix rho = h / tr;
    if (hermitian_eigenvalues(rho).minCoeff() < kPositivityFloor) continue;
    out.states.emplace_back(Operator(rho, sop.system()), DensityMatrix::Trusted{});
  }
  return out;
}

/// Steady density matrices of a generator. Throws when the kernel is empty.
inline std::vector<DensityMatrix> steady_states(const Superoperator& sop, double zero_tol = kZeroEigenvalueTol) {
  auto space = steady_space(sop, zero_tol);
  if (space.dim == 0) throw NumericalError("steady_states: no kernel found");
  return std::move(space.states);
}

}  // namespace dissipative
