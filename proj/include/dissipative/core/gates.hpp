#pragma once

#include <cmath>

#include "dissipative/core/types.hpp"

namespace dissipative::gates {

inline Matrix identity(Eigen::Index n = 2) { return Matrix::Identity(n, n); }

inline Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}
inline Matrix pauli_y() {
  Matrix m(2, 2);
  m << 0, -kI, kI, 0;
  return m;
}
inline Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}
inline Matrix hadamard() { return (pauli_x() + pauli_z()) / std::sqrt(2.0); }

/// |0><1|
inline Matrix lowering() {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 1) = 1.0;
  return m;
}
/// |1><0|
inline Matrix raising() { return lowering().transpose(); }

inline Matrix ket_bra(Eigen::Index n, Eigen::Index row, Eigen::Index col) {
  Matrix m = Matrix::Zero(n, n);
  m(row, col) = 1.0;
  return m;
}
inline Matrix proj0() { return ket_bra(2, 0, 0); }
inline Matrix proj1() { return ket_bra(2, 1, 1); }

inline Matrix rz(double theta) {
  Matrix m = Matrix::Zero(2, 2);
  m(0, 0) = std::exp(-0.5 * kI * theta);
  m(1, 1) = std::exp(0.5 * kI * theta);
  return m;
}

/// Control is the first factor.
inline Matrix cnot() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = m(1, 1) = 1.0;
  m(2, 3) = m(3, 2) = 1.0;
  return m;
}
inline Matrix cz() {
  Matrix m = Matrix::Identity(4, 4);
  m(3, 3) = -1.0;
  return m;
}

}  // namespace dissipative::gates
