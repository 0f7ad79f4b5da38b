#pragma once

#include <string>
#include <utility>
#include <vector>

#include "dissipative/core/gates.hpp"
#include "dissipative/core/ops.hpp"
#include "dissipative/core/random.hpp"

namespace dissipative::dqc {

struct Gate {
  std::vector<int> support;  // 1 or 2 qubit indices
  Matrix unitary;
  std::string name;
};

/// Ordered gate sequence U_1 ... U_T on n qubits.
class QuantumCircuit {
 public:
  explicit QuantumCircuit(int n_qubits) : n_(n_qubits) {
    detail::require(n_qubits >= 1, "QuantumCircuit: need at least one qubit");
  }
  QuantumCircuit(int n_qubits, std::vector<Gate> gates) : QuantumCircuit(n_qubits) {
    for (auto& g : gates) add(std::move(g));
  }

  QuantumCircuit& add(Gate g) {
    detail::require(g.support.size() == 1 || g.support.size() == 2, "gate support must have 1 or 2 qubits");
    const auto dim = Eigen::Index{1} << g.support.size();
    detail::require(g.unitary.rows() == dim && g.unitary.cols() == dim, "gate matrix size does not match its support");
    SiteSystem::qubits(n_).check_support(g.support);
    const double err = detail::max_abs(g.unitary.adjoint() * g.unitary - Matrix::Identity(dim, dim));
    detail::require(err <= 1e-10, "gate " + (g.name.empty() ? std::string("#") + std::to_string(gates_.size() + 1) : g.name) +
                                      " is not unitary (error " + std::to_string(err) + ")");
    gates_.push_back(std::move(g));
    return *this;
  }
  QuantumCircuit& add(Matrix u, std::vector<int> support, std::string name = {}) {
    return add(Gate{std::move(support), std::move(u), std::move(name)});
  }

  int n_qubits() const { return n_; }
  int depth() const { return static_cast<int>(gates_.size()); }
  const std::vector<Gate>& gates() const { return gates_; }
  SiteSystem system() const { return SiteSystem::qubits(n_); }

  /// U_t embedded on all n qubits (t is 1-based).
  Matrix full_gate(int t) const {
    detail::require(t >= 1 && t <= depth(), "gate index out of range");
    const Gate& g = gates_[static_cast<std::size_t>(t - 1)];
    return tensor_embed(LocalOperator::on_qubits(g.unitary, g.support), system()).matrix();
  }

  /// Same shape with every gate replaced by the identity.
  QuantumCircuit identity_like() const {
    QuantumCircuit out(n_);
    for (const auto& g : gates_) {
      const auto dim = Eigen::Index{1} << g.support.size();
      out.add(Matrix::Identity(dim, dim), g.support, "I");
    }
    return out;
  }

  /// |psi_0> = |0...0>, |psi_t> = U_t |psi_{t-1}>.
  std::vector<Vector> history() const {
    const auto d = Eigen::Index{1} << n_;
    std::vector<Vector> out;
    Vector psi = Vector::Zero(d);
    psi(0) = 1.0;
    out.push_back(psi);
    for (int t = 1; t <= depth(); ++t) {
      const Gate& g = gates_[static_cast<std::size_t>(t - 1)];
      const LocalLayout layout(system(), g.support);
      psi = layout.left(g.unitary, Matrix(psi));
      out.push_back(psi);
    }
    return out;
  }

 private:
  int n_;
  std::vector<Gate> gates_;
};

/// Random circuit: each gate is a Haar unitary on one qubit or, when n >= 2,
/// on a random ordered pair with probability `two_qubit_fraction`.
inline QuantumCircuit random_circuit(int n_qubits, int depth, Rng& rng, double two_qubit_fraction = 0.5) {
  QuantumCircuit c(n_qubits);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> site(0, n_qubits - 1);
  for (int t = 0; t < depth; ++t) {
    if (n_qubits >= 2 && coin(rng) < two_qubit_fraction) {
      const int a = site(rng);
      int b = site(rng);
      while (b == a) b = site(rng);
      c.add(random_unitary(4, rng), {a, b}, "U4");
    } else {
      c.add(random_unitary(2, rng), {site(rng)}, "U2");
    }
  }
  return c;
}

}  // namespace dissipative::dqc
