#pragma once

#include <vector>

#include "dissipative/dse/graph.hpp"

namespace dissipative::dse {

/// Qubits on the edges of an lx x ly torus. Edge (x, y, horizontal) has index
/// 2(y lx + x), the vertical one 2(y lx + x) + 1. The horizontal edge joins
/// vertices (x, y) and (x+1, y); the vertical one (x, y) and (x, y+1).
struct ToricLattice {
  int lx = 2, ly = 2;

  int qubits() const { return 2 * lx * ly; }
  int h_edge(int x, int y) const { return 2 * (wrap(y, ly) * lx + wrap(x, lx)); }
  int v_edge(int x, int y) const { return h_edge(x, y) + 1; }

  std::vector<int> star(int x, int y) const { return {h_edge(x, y), h_edge(x - 1, y), v_edge(x, y), v_edge(x, y - 1)}; }
  /// Face with lower-left corner (x, y).
  std::vector<int> plaquette(int x, int y) const { return {h_edge(x, y), h_edge(x, y + 1), v_edge(x, y), v_edge(x + 1, y)}; }

  std::vector<PauliString> stars() const {
    std::vector<PauliString> out;
    for (int y = 0; y < ly; ++y)
      for (int x = 0; x < lx; ++x) out.push_back(PauliString::on_sites(static_cast<std::size_t>(qubits()), star(x, y), 'X'));
    return out;
  }
  std::vector<PauliString> plaquettes() const {
    std::vector<PauliString> out;
    for (int y = 0; y < ly; ++y)
      for (int x = 0; x < lx; ++x) out.push_back(PauliString::on_sites(static_cast<std::size_t>(qubits()), plaquette(x, y), 'Z'));
    return out;
  }

 private:
  static int wrap(int a, int n) { return ((a % n) + n) % n; }
};

/// Star terms (1 - Π X)/2 then plaquette terms (1 - Π Z)/2.
inline FrustrationFreeHamiltonian toric_code(int lx, int ly, std::size_t max_dim = 1024) {
  detail::require(lx >= 2 && ly >= 2, "toric_code: lx and ly must be >= 2");
  const ToricLattice lat{lx, ly};
  if (lat.qubits() >= 63 || (std::size_t{1} << lat.qubits()) > max_dim)
    throw BudgetExceeded("toric_code: " + std::to_string(lat.qubits()) + " qubits exceed dimension budget " + std::to_string(max_dim));
  std::vector<LocalOperator> terms;
  for (const auto& s : lat.stars()) terms.push_back(stabilizer_term(s));
  for (const auto& p : lat.plaquettes()) terms.push_back(stabilizer_term(p));
  return FrustrationFreeHamiltonian(SiteSystem::qubits(lat.qubits()), std::move(terms));
}

}  // namespace dissipative::dse
