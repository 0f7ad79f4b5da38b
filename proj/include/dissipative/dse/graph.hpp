#pragma once

#include <algorithm>
#include <utility>
#include <vector>

#include "dissipative/dse/channel.hpp"

namespace dissipative::dse {

/// Simple undirected graph.
struct GraphSpec {
  int vertices = 0;
  std::vector<std::pair<int, int>> edges;

  GraphSpec() = default;
  GraphSpec(int n, std::vector<std::pair<int, int>> e) : vertices(n), edges(std::move(e)) { validate(); }

  void validate() const {
    detail::require(vertices >= 1, "graph needs at least one vertex");
    std::vector<std::pair<int, int>> seen;
    for (auto [a, b] : edges) {
      detail::require(a >= 0 && b >= 0 && a < vertices && b < vertices, "graph edge references a missing vertex");
      detail::require(a != b, "graph edges may not be self-loops");
      seen.emplace_back(std::min(a, b), std::max(a, b));
    }
    std::sort(seen.begin(), seen.end());
    detail::require(std::adjacent_find(seen.begin(), seen.end()) == seen.end(), "duplicate graph edge");
  }

  std::vector<int> neighbors(int v) const {
    std::vector<int> out;
    for (auto [a, b] : edges) {
      if (a == v) out.push_back(b);
      if (b == v) out.push_back(a);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  static GraphSpec path(int n) {
    std::vector<std::pair<int, int>> e;
    for (int v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
    return GraphSpec(n, e);
  }

  /// Every labelled graph on n vertices (2^(n(n-1)/2) of them).
  static std::vector<GraphSpec> all(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
    std::vector<GraphSpec> out;
    for (unsigned mask = 0; mask < (1u << pairs.size()); ++mask) {
      std::vector<std::pair<int, int>> e;
      for (std::size_t k = 0; k < pairs.size(); ++k)
        if (mask & (1u << k)) e.push_back(pairs[k]);
      out.emplace_back(n, e);
    }
    return out;
  }
};

/// Stabilizer X_v Π_{u ~ v} Z_u as a full-length Pauli string.
inline PauliString vertex_stabilizer(const GraphSpec& g, int v) {
  std::string ops(static_cast<std::size_t>(g.vertices), 'I');
  ops[static_cast<std::size_t>(v)] = 'X';
  for (int u : g.neighbors(v)) ops[static_cast<std::size_t>(u)] = 'Z';
  return PauliString(ops);
}

/// (1 - S)/2 on the sorted support of S.
inline LocalOperator stabilizer_term(const PauliString& s) {
  const auto sup = s.support();
  const Matrix loc = s.local_matrix();
  return LocalOperator::on_qubits((Matrix::Identity(loc.rows(), loc.cols()) - loc) / 2.0, sup);
}

/// One term (1 - X_v Π Z_u)/2 per vertex; the vertex comes first in the support.
inline FrustrationFreeHamiltonian graph_hamiltonian(const GraphSpec& g) {
  g.validate();
  std::vector<LocalOperator> terms;
  for (int v = 0; v < g.vertices; ++v) {
    const auto nb = g.neighbors(v);
    std::vector<int> sup{v};
    Matrix s = gates::pauli_x();
    for (int u : nb) {
      sup.push_back(u);
      s = kron(s, gates::pauli_z());
    }
    const Eigen::Index n = s.rows();
    terms.push_back(LocalOperator::on_qubits((Matrix::Identity(n, n) - s) / 2.0, sup));
  }
  return FrustrationFreeHamiltonian(SiteSystem::qubits(g.vertices), std::move(terms));
}

/// Π_{(a,b)} CZ_ab |+>^n.
inline Vector graph_state(const GraphSpec& g) {
  g.validate();
  const auto d = Eigen::Index{1} << g.vertices;
  Vector psi = Vector::Constant(d, 1.0 / std::sqrt(static_cast<double>(d)));
  for (Eigen::Index i = 0; i < d; ++i)
    for (auto [a, b] : g.edges) {
      const bool ba = (i >> (g.vertices - 1 - a)) & 1, bb = (i >> (g.vertices - 1 - b)) & 1;
      if (ba && bb) psi(i) = -psi(i);
    }
  return psi;
}

/// Jumps Z_v H_v; since the H_v commute and are projectors, Σ L^†L = H.
inline LindbladModel graph_liouvillian(const GraphSpec& g) {
  const auto h = graph_hamiltonian(g);
  std::vector<Operator> jumps;
  for (int v = 0; v < g.vertices; ++v) {
    const Matrix z = tensor_embed(LocalOperator::on_qubits(gates::pauli_z(), {v}), h.system()).matrix();
    jumps.emplace_back(z * h.term_matrix(static_cast<std::size_t>(v)), h.system());
  }
  return LindbladModel(h.system(), std::nullopt, std::move(jumps));
}

/// {-(h_i + h_j)/2} over eigenvalue pairs of H.
inline std::vector<cplx> graph_spectrum_prediction(const GraphSpec& g) {
  const RealVector h = hermitian_eigenvalues(graph_hamiltonian(g).matrix());
  std::vector<cplx> out;
  for (Eigen::Index i = 0; i < h.size(); ++i)
    for (Eigen::Index j = 0; j < h.size(); ++j) out.emplace_back(-(h(i) + h(j)) / 2.0, 0.0);
  return out;
}

/// 1D cluster chain Hamiltonian (graph state of the path).
inline FrustrationFreeHamiltonian cluster_chain(int n) { return graph_hamiltonian(GraphSpec::path(n)); }

}  // namespace dissipative::dse
