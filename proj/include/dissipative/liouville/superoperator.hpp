#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "dissipative/core/ops.hpp"

namespace dissipative {

/// Linear map on operators, stored as a matrix acting on column-stacked
/// vectorizations: vec(A X B) = (B^T ⊗ A) vec(X).
class Superoperator {
 public:
  Superoperator() = default;
  Superoperator(Matrix m, SiteSystem system) : m_(std::move(m)), system_(std::move(system)) {
    const auto d = static_cast<Eigen::Index>(system_.total_dim());
    detail::require(m_.rows() == d * d && m_.cols() == d * d, "Superoperator: matrix must be dim^2 x dim^2");
  }

  static Superoperator identity(const SiteSystem& s) {
    const auto d = static_cast<Eigen::Index>(s.total_dim());
    return Superoperator(Matrix::Identity(d * d, d * d), s);
  }

  const Matrix& matrix() const { return m_; }
  const SiteSystem& system() const { return system_; }
  Eigen::Index hilbert_dim() const { return static_cast<Eigen::Index>(system_.total_dim()); }

  Matrix apply(const Matrix& x) const { return unvec(m_ * vec(x), hilbert_dim()); }
  Operator apply(const Operator& x) const { return Operator(apply(x.matrix()), system_); }

  /// Adjoint with respect to the Hilbert-Schmidt inner product.
  Superoperator adjoint() const { return Superoperator(m_.adjoint(), system_); }

  /// max |L^*(1)|; zero for trace-preserving generators.
  double generator_trace_defect() const {
    return detail::max_abs(apply_adjoint_identity());
  }
  /// max |T^*(1) - 1|; zero for trace-preserving channels.
  double channel_trace_defect() const {
    const auto d = hilbert_dim();
    return detail::max_abs(apply_adjoint_identity() - Matrix::Identity(d, d));
  }

  friend Superoperator operator*(double c, const Superoperator& s) { return Superoperator(c * s.m_, s.system_); }

 private:
  Matrix apply_adjoint_identity() const {
    const auto d = hilbert_dim();
    const Matrix id = Matrix::Identity(d, d);
    return unvec(m_.adjoint() * vec(id), d);
  }

  Matrix m_;
  SiteSystem system_;
};

namespace detail {
/// out += w * (a ⊗ b), skipping zero entries of a.
inline void add_kron(Matrix& out, cplx w, const Matrix& a, const Matrix& b) {
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const cplx v = a(i, j);
      if (v == cplx{}) continue;
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) += (w * v) * b;
    }
}
}  // namespace detail

/// Optional Hamiltonian plus jump operators on a common system.
struct LindbladModel {
  SiteSystem system;
  std::optional<Operator> hamiltonian;
  std::vector<Operator> jumps;

  LindbladModel() = default;
  LindbladModel(SiteSystem s, std::optional<Operator> h, std::vector<Operator> l)
      : system(std::move(s)), hamiltonian(std::move(h)), jumps(std::move(l)) {
    validate();
  }

  void validate() const {
    if (hamiltonian) {
      detail::require(hamiltonian->system() == system, "LindbladModel: Hamiltonian dimension mismatch");
      detail::require(hamiltonian->is_hermitian(kHermitianTol), "LindbladModel: Hamiltonian is not Hermitian");
    }
    for (const auto& l : jumps) detail::require(l.system() == system, "LindbladModel: jump operator dimension mismatch");
  }
};

/// L(X) = -i[H, X] + sum_k L_k X L_k^† - 1/2 {L_k^† L_k, X}.
inline Superoperator assemble_generator(const LindbladModel& model) {
  model.validate();
  const auto d = static_cast<Eigen::Index>(model.system.total_dim());
  const Matrix id = Matrix::Identity(d, d);
  Matrix out = Matrix::Zero(d * d, d * d);
  Matrix decay = Matrix::Zero(d, d);
  for (const auto& jump : model.jumps) {
    const Matrix& l = jump.matrix();
    detail::add_kron(out, 1.0, l.conjugate(), l);
    decay.noalias() += l.adjoint() * l;
  }
  // Non-Hermitian effective part G = -iH - decay/2 contributes I ⊗ G + conj(G) ⊗ I.
  Matrix g = -0.5 * decay;
  if (model.hamiltonian) g -= kI * model.hamiltonian->matrix();
  detail::add_kron(out, 1.0, id, g);
  detail::add_kron(out, 1.0, g.conjugate(), id);
  return Superoperator(std::move(out), model.system);
}

}  // namespace dissipative
