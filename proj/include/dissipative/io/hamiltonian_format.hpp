#pragma once

#include <fstream>
#include <sstream>

#include "dissipative/dse/toric.hpp"
#include "dissipative/io/text.hpp"

namespace dissipative::io {

/// Hamiltonian text format. First statement fixes the sites:
///
///   qubits 3            or   dims 2 3 2
///
/// then any number of terms:
///
///   vertex 0 : 1 2      # (1 - X_0 Z_1 Z_2)/2
///   star 0 1 2 3        # (1 - X X X X)/2
///   plaquette 4 5 6 7   # (1 - Z Z Z Z)/2
///   pauli XZ 0 1        # (1 - S)/2 for a Pauli string on the listed sites
///   term 0 1 : <entries> # explicit projector, row-major, real or (re,im)
///
/// or a single preset line in place of both: `toric <lx> <ly>` or
/// `graph <n> : a-b c-d ...`.
inline dse::FrustrationFreeHamiltonian parse_hamiltonian(std::istream& in) {
  const auto lines = tokenize(in);
  if (lines.empty()) throw ParseError(1, "empty Hamiltonian description");
  const Line& head = lines.front();
  const auto& h0 = head.tokens;
  auto wrap = [](int line, auto&& f) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(line, e.what());
    }
  };

  if (h0[0] == "toric") {
    if (h0.size() != 3) throw ParseError(head.number, "usage: toric <lx> <ly>");
    if (lines.size() > 1) throw ParseError(lines[1].number, "nothing may follow a preset");
    const int lx = parse_int(h0[1], head.number), ly = parse_int(h0[2], head.number);
    return wrap(head.number, [&] { return dse::toric_code(lx, ly); });
  }
  if (h0[0] == "graph") {
    if (h0.size() < 3 || h0[2] != ":") throw ParseError(head.number, "usage: graph <n> : a-b c-d ...");
    if (lines.size() > 1) throw ParseError(lines[1].number, "nothing may follow a preset");
    const int n = parse_int(h0[1], head.number);
    std::vector<std::pair<int, int>> edges;
    for (std::size_t k = 3; k < h0.size(); ++k) {
      const auto dash = h0[k].find('-');
      if (dash == std::string::npos) throw ParseError(head.number, "edge must look like a-b, got '" + h0[k] + "'");
      edges.emplace_back(parse_int(h0[k].substr(0, dash), head.number), parse_int(h0[k].substr(dash + 1), head.number));
    }
    return wrap(head.number, [&] { return dse::graph_hamiltonian(dse::GraphSpec(n, edges)); });
  }

  std::vector<int> dims;
  if (h0[0] == "qubits" && h0.size() == 2) {
    const int n = parse_int(h0[1], head.number);
    if (n < 1) throw ParseError(head.number, "qubit count must be >= 1");
    dims.assign(static_cast<std::size_t>(n), 2);
  } else if (h0[0] == "dims" && h0.size() >= 2) {
    for (std::size_t k = 1; k < h0.size(); ++k) dims.push_back(parse_int(h0[k], head.number));
  } else {
    throw ParseError(head.number, "first statement must be 'qubits <n>', 'dims ...', 'toric' or 'graph'");
  }
  const SiteSystem sys = wrap(head.number, [&] { return SiteSystem(dims); });
  const auto n_sites = static_cast<std::size_t>(sys.size());

  std::vector<LocalOperator> terms;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const Line& l = lines[li];
    const auto& t = l.tokens;
    auto ints = [&](std::size_t from, std::size_t to) {
      std::vector<int> out;
      for (std::size_t k = from; k < to; ++k) out.push_back(parse_int(t[k], l.number));
      return out;
    };
    auto colon_at = [&]() {
      std::size_t c = 1;
      while (c < t.size() && t[c] != ":") ++c;
      if (c == t.size()) throw ParseError(l.number, "missing ':'");
      return c;
    };
    const std::string& kind = t[0];
    wrap(l.number, [&] {
      if (kind == "vertex") {
        const std::size_t c = colon_at();
        if (c != 2) throw ParseError(l.number, "usage: vertex <v> : <neighbors>");
        std::vector<int> sites{parse_int(t[1], l.number)};
        for (int u : ints(c + 1, t.size())) sites.push_back(u);
        std::string ops(n_sites, 'I');
        for (std::size_t k = 0; k < sites.size(); ++k) {
          if (sites[k] < 0 || static_cast<std::size_t>(sites[k]) >= n_sites) throw ParseError(l.number, "site out of range");
          ops[static_cast<std::size_t>(sites[k])] = k == 0 ? 'X' : 'Z';
        }
        terms.push_back(dse::stabilizer_term(dse::PauliString(ops)));
      } else if (kind == "star" || kind == "plaquette") {
        const auto sites = ints(1, t.size());
        terms.push_back(dse::stabilizer_term(dse::PauliString::on_sites(n_sites, sites, kind == "star" ? 'X' : 'Z')));
      } else if (kind == "pauli") {
        if (t.size() < 3) throw ParseError(l.number, "usage: pauli <letters> <sites>");
        const std::string& letters = t[1];
        const auto sites = ints(2, t.size());
        if (sites.size() != letters.size()) throw ParseError(l.number, "one site per Pauli letter required");
        const dse::PauliString local(letters);
        const Matrix m = local.matrix();
        terms.push_back(LocalOperator::on_qubits((Matrix::Identity(m.rows(), m.cols()) - m) / 2.0, sites));
      } else if (kind == "term") {
        const std::size_t c = colon_at();
        const auto sites = ints(1, c);
        sys.check_support(sites);
        std::vector<int> local_dims;
        Eigen::Index n = 1;
        for (int s : sites) {
          local_dims.push_back(sys.dim(static_cast<std::size_t>(s)));
          n *= sys.dim(static_cast<std::size_t>(s));
        }
        const Matrix m = parse_matrix(t, c + 1, n, l.number);
        if (detail::max_abs(m * m - m) > dse::kProjectorTol || detail::max_abs(m - m.adjoint()) > dse::kProjectorTol)
          throw ParseError(l.number, "term is not a projector");
        terms.emplace_back(m, sites, local_dims);
      } else {
        throw ParseError(l.number, "unknown term kind '" + kind + "'");
      }
      terms.back().check_against(sys);
      return 0;
    });
  }
  if (terms.empty()) throw ParseError(lines.back().number, "Hamiltonian has no terms");
  return wrap(lines.back().number, [&] { return dse::FrustrationFreeHamiltonian(sys, terms); });
}

inline dse::FrustrationFreeHamiltonian parse_hamiltonian_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_hamiltonian(ss);
}

inline dse::FrustrationFreeHamiltonian load_hamiltonian(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open Hamiltonian file '" + path + "'");
  return parse_hamiltonian(f);
}

}  // namespace dissipative::io
