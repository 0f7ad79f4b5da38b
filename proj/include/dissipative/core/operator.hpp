#pragma once

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "dissipative/core/site_system.hpp"
#include "dissipative/core/types.hpp"

namespace dissipative {

inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;
inline constexpr double kPositivityFloor = -1e-9;

/// Dense square matrix acting on the Hilbert space of a SiteSystem.
class Operator {
 public:
  Operator() = default;

  Operator(Matrix m, SiteSystem system) : m_(std::move(m)), system_(std::move(system)) {
    detail::require(m_.rows() == m_.cols(), "Operator: matrix must be square");
    detail::require(static_cast<std::size_t>(m_.rows()) == system_.total_dim(),
                    "Operator: matrix dimension " + std::to_string(m_.rows()) + " does not match system dimension " +
                        std::to_string(system_.total_dim()));
  }

  /// Single-factor operator; the system is one site of dimension rows().
  explicit Operator(Matrix m) : Operator(m, SiteSystem({static_cast<int>(m.rows())})) {}

  static Operator identity(const SiteSystem& s) {
    const auto n = static_cast<Eigen::Index>(s.total_dim());
    return Operator(Matrix::Identity(n, n), s);
  }
  static Operator zero(const SiteSystem& s) {
    const auto n = static_cast<Eigen::Index>(s.total_dim());
    return Operator(Matrix::Zero(n, n), s);
  }

  const Matrix& matrix() const { return m_; }
  const SiteSystem& system() const { return system_; }
  Eigen::Index dim() const { return m_.rows(); }

  Operator adjoint() const { return Operator(m_.adjoint(), system_); }
  cplx trace() const { return m_.trace(); }

  double hermiticity_error() const { return detail::max_abs(m_ - m_.adjoint()); }
  bool is_hermitian(double tol = kHermitianTol) const { return hermiticity_error() <= tol; }
  bool is_unitary(double tol = 1e-10) const {
    return detail::max_abs(m_.adjoint() * m_ - Matrix::Identity(dim(), dim())) <= tol;
  }
  bool is_projector(double tol = 1e-10) const { return is_hermitian(tol) && detail::max_abs(m_ * m_ - m_) <= tol; }

  /// Tensor product this ⊗ other.
  Operator kron(const Operator& other) const;

  friend Operator operator*(const Operator& a, const Operator& b) {
    detail::require(a.system_ == b.system_, "Operator product: system mismatch");
    return Operator(a.m_ * b.m_, a.system_);
  }
  friend Operator operator+(const Operator& a, const Operator& b) {
    detail::require(a.system_ == b.system_, "Operator sum: system mismatch");
    return Operator(a.m_ + b.m_, a.system_);
  }
  friend Operator operator-(const Operator& a, const Operator& b) {
    detail::require(a.system_ == b.system_, "Operator difference: system mismatch");
    return Operator(a.m_ - b.m_, a.system_);
  }
  friend Operator operator*(cplx c, const Operator& a) { return Operator(c * a.m_, a.system_); }

 private:
  Matrix m_;
  SiteSystem system_;
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out = Matrix::Zero(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      const cplx v = a(i, j);
      if (v == cplx{}) continue;
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = v * b;
    }
  return out;
}

inline Operator Operator::kron(const Operator& other) const {
  return Operator(dissipative::kron(m_, other.m_), system_.tensor(other.system_));
}

/// Eigenvalues of a Hermitian matrix (its Hermitian part is used).
inline RealVector hermitian_eigenvalues(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Hermitian, positive semidefinite, unit-trace operator.
class DensityMatrix {
 public:
  struct Trusted {};

  DensityMatrix() = default;

  /// Validates Hermiticity, trace and positivity against the module tolerances.
  explicit DensityMatrix(Operator op) : op_(std::move(op)) {
    const double herm = op_.hermiticity_error();
    if (herm > kHermitianTol) throw InputError("DensityMatrix: not Hermitian (error " + std::to_string(herm) + ")");
    const cplx tr = op_.trace();
    if (std::abs(tr - 1.0) > kTraceTol) throw InputError("DensityMatrix: trace " + std::to_string(tr.real()) + " != 1");
    const double lmin = hermitian_eigenvalues(op_.matrix()).minCoeff();
    if (lmin < kPositivityFloor) throw InputError("DensityMatrix: negative eigenvalue " + std::to_string(lmin));
  }

  DensityMatrix(Matrix m, const SiteSystem& s) : DensityMatrix(Operator(std::move(m), s)) {}

  /// Re-symmetrizes and skips the positivity eigensolve. For outputs of maps
  /// that are positive by construction.
  DensityMatrix(Operator op, Trusted) : op_(Operator(0.5 * (op.matrix() + op.matrix().adjoint()), op.system())) {}

  static DensityMatrix from_pure(const Vector& psi, const SiteSystem& s) {
    const double n = psi.norm();
    if (n == 0.0) throw InputError("DensityMatrix::from_pure: zero vector");
    const Vector v = psi / n;
    return DensityMatrix(Operator(v * v.adjoint(), s), Trusted{});
  }
  static DensityMatrix maximally_mixed(const SiteSystem& s) {
    const auto n = static_cast<Eigen::Index>(s.total_dim());
    return DensityMatrix(Operator(Matrix::Identity(n, n) / static_cast<double>(n), s), Trusted{});
  }
  static DensityMatrix basis_state(std::size_t index, const SiteSystem& s) {
    Vector v = Vector::Zero(static_cast<Eigen::Index>(s.total_dim()));
    v(static_cast<Eigen::Index>(index)) = 1.0;
    return from_pure(v, s);
  }

  const Operator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  const SiteSystem& system() const { return op_.system(); }
  Eigen::Index dim() const { return op_.dim(); }

  double min_eigenvalue() const { return hermitian_eigenvalues(op_.matrix()).minCoeff(); }

 private:
  Operator op_;
};

/// Operator on an ordered subset of sites of a larger system.
class LocalOperator {
 public:
  LocalOperator() = default;

  LocalOperator(Operator op, std::vector<int> support) : op_(std::move(op)), support_(std::move(support)) {
    detail::require(!support_.empty(), "LocalOperator: empty support");
    std::vector<int> sorted = support_;
    std::sort(sorted.begin(), sorted.end());
    detail::require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
                    "LocalOperator: duplicate support index");
    detail::require(sorted.front() >= 0, "LocalOperator: negative site index");
    detail::require(op_.system().size() == support_.size(),
                    "LocalOperator: operator has " + std::to_string(op_.system().size()) + " factors but support has " +
                        std::to_string(support_.size()) + " sites");
  }

  /// Convenience: `m` acts on `support` whose local dimensions are `dims`.
  LocalOperator(Matrix m, std::vector<int> support, std::vector<int> dims)
      : LocalOperator(Operator(std::move(m), SiteSystem(std::move(dims))), std::move(support)) {}

  /// Qubit-only convenience.
  static LocalOperator on_qubits(Matrix m, std::vector<int> support) {
    std::vector<int> dims(support.size(), 2);
    return LocalOperator(std::move(m), std::move(support), std::move(dims));
  }

  const Operator& op() const { return op_; }
  const Matrix& matrix() const { return op_.matrix(); }
  const std::vector<int>& support() const { return support_; }

  /// Throws unless this operator fits `system`.
  void check_against(const SiteSystem& system) const {
    system.check_support(support_);
    for (std::size_t i = 0; i < support_.size(); ++i)
      detail::require(system.dim(static_cast<std::size_t>(support_[i])) == op_.system().dim(i),
                      "LocalOperator: local dimension mismatch at site " + std::to_string(support_[i]));
  }

 private:
  Operator op_;
  std::vector<int> support_;
};

}  // namespace dissipative
