#pragma once

#include <string>
#include <vector>

#include "dissipative/core/gates.hpp"
#include "dissipative/core/operator.hpp"

namespace dissipative::dse {

/// sign * P_0 ⊗ P_1 ⊗ ... with P_k in {I, X, Y, Z} and sign in {±1, ±i}.
class PauliString {
 public:
  PauliString() = default;
  explicit PauliString(std::string ops, cplx sign = 1.0) : ops_(std::move(ops)), sign_(sign) {
    for (char c : ops_) detail::require(c == 'I' || c == 'X' || c == 'Y' || c == 'Z', std::string("invalid Pauli letter '") + c + "'");
  }

  /// `letter` on the listed sites of an n-site register, identity elsewhere.
  static PauliString on_sites(std::size_t n, const std::vector<int>& sites, char letter) {
    std::string ops(n, 'I');
    for (int s : sites) {
      detail::require(s >= 0 && static_cast<std::size_t>(s) < n, "PauliString: site out of range");
      ops[static_cast<std::size_t>(s)] = letter;
    }
    return PauliString(ops);
  }

  const std::string& ops() const { return ops_; }
  cplx sign() const { return sign_; }
  std::size_t size() const { return ops_.size(); }
  bool is_identity() const { return ops_.find_first_not_of('I') == std::string::npos; }

  std::vector<int> support() const {
    std::vector<int> out;
    for (std::size_t k = 0; k < ops_.size(); ++k)
      if (ops_[k] != 'I') out.push_back(static_cast<int>(k));
    return out;
  }

  /// Letters restricted to the support, in site order.
  std::string compact() const {
    std::string out;
    for (char c : ops_)
      if (c != 'I') out += c;
    return out;
  }

  bool commutes_with(const PauliString& o) const {
    detail::require(size() == o.size(), "PauliString: length mismatch");
    int anti = 0;
    for (std::size_t k = 0; k < size(); ++k)
      if (ops_[k] != 'I' && o.ops_[k] != 'I' && ops_[k] != o.ops_[k]) ++anti;
    return anti % 2 == 0;
  }

  friend PauliString operator*(const PauliString& a, const PauliString& b) {
    detail::require(a.size() == b.size(), "PauliString: length mismatch");
    std::string ops(a.size(), 'I');
    cplx sign = a.sign_ * b.sign_;
    for (std::size_t k = 0; k < a.size(); ++k) {
      const auto [letter, phase] = multiply(a.ops_[k], b.ops_[k]);
      ops[k] = letter;
      sign *= phase;
    }
    return PauliString(ops, sign);
  }

  bool operator==(const PauliString& o) const { return ops_ == o.ops_ && sign_ == o.sign_; }

  static Matrix letter_matrix(char c) {
    switch (c) {
      case 'X': return gates::pauli_x();
      case 'Y': return gates::pauli_y();
      case 'Z': return gates::pauli_z();
      default: return gates::identity();
    }
  }

  /// Matrix on the support only (sign included).
  Matrix local_matrix() const {
    Matrix m = Matrix::Identity(1, 1);
    for (char c : ops_)
      if (c != 'I') m = kron(m, letter_matrix(c));
    return sign_ * m;
  }

  /// Full 2^n x 2^n matrix.
  Matrix matrix() const {
    Matrix m = Matrix::Identity(1, 1);
    for (char c : ops_) m = kron(m, letter_matrix(c));
    return sign_ * m;
  }

 private:
  static std::pair<char, cplx> multiply(char a, char b) {
    if (a == 'I') return {b, 1.0};
    if (b == 'I') return {a, 1.0};
    if (a == b) return {'I', 1.0};
    // XY = iZ, YZ = iX, ZX = iY, reversed order gives -i.
    const std::string cyc = "XYZ";
    const auto ia = cyc.find(a), ib = cyc.find(b);
    const char c = cyc[3 - ia - ib];
    return {c, (ib == (ia + 1) % 3) ? kI : -kI};
  }

  std::string ops_;
  cplx sign_ = 1.0;
};

/// Single-letter Pauli anticommuting with `letter` (X, Y -> Z; Z -> X).
inline char anticommuting_letter(char letter) {
  detail::require(letter != 'I', "identity has no anticommuting Pauli");
  return letter == 'Z' ? 'X' : 'Z';
}

/// Pauli string S and sign s with m = s * S, if m (on `k` qubits) is one.
inline bool decompose_pauli(const Matrix& m, int k, PauliString* out, double tol = 1e-10) {
  const auto dim = Eigen::Index{1} << k;
  if (m.rows() != dim || m.cols() != dim) return false;
  const char letters[4] = {'I', 'X', 'Y', 'Z'};
  for (Eigen::Index code = 0; code < (Eigen::Index{1} << (2 * k)); ++code) {
    std::string ops;
    for (int q = 0; q < k; ++q) ops += letters[(code >> (2 * (k - 1 - q))) & 3];
    const PauliString p(ops);
    const cplx c = (p.matrix().adjoint() * m).trace() / static_cast<double>(dim);
    if (std::abs(std::abs(c) - 1.0) < tol && detail::max_abs(m - c * p.matrix()) < tol) {
      if (out) *out = PauliString(ops, c);
      return true;
    }
  }
  return false;
}

}  // namespace dissipative::dse
