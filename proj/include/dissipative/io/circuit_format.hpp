#pragma once

#include <fstream>
#include <sstream>

#include "dissipative/dqc/circuit.hpp"
#include "dissipative/io/text.hpp"

namespace dissipative::io {

/// Circuit text format:
///
///   qubits 2
///   H 0
///   CNOT 0 1          # control first
///   RZ(0.785) 1
///   U 0 : (0,0) 1 1 0 # explicit 2x2 or 4x4, row-major, (re,im) or real
///
/// Named gates: I X Y Z H CNOT CZ RZ(theta).
inline dqc::QuantumCircuit parse_circuit(std::istream& in) {
  const auto lines = tokenize(in);
  if (lines.empty()) throw ParseError(1, "empty circuit description");
  const Line& head = lines.front();
  if (head.tokens[0] != "qubits" || head.tokens.size() != 2)
    throw ParseError(head.number, "first statement must be 'qubits <n>'");
  const int n = parse_int(head.tokens[1], head.number);
  if (n < 1) throw ParseError(head.number, "qubit count must be >= 1");
  dqc::QuantumCircuit c(n);

  for (std::size_t li = 1; li < lines.size(); ++li) {
    const Line& l = lines[li];
    const std::string& name = l.tokens[0];
    std::vector<int> support;
    Matrix u;
    auto sites = [&](std::size_t from, std::size_t to) {
      for (std::size_t k = from; k < to; ++k) support.push_back(parse_int(l.tokens[k], l.number));
    };
    if (name == "U") {
      std::size_t colon = 1;
      while (colon < l.tokens.size() && l.tokens[colon] != ":") ++colon;
      if (colon == l.tokens.size()) throw ParseError(l.number, "explicit gate needs 'U <sites> : <entries>'");
      sites(1, colon);
      if (support.empty() || support.size() > 2) throw ParseError(l.number, "explicit gate must act on 1 or 2 qubits");
      u = parse_matrix(l.tokens, colon + 1, Eigen::Index{1} << support.size(), l.number);
    } else {
      const bool two = name == "CNOT" || name == "CZ";
      if (l.tokens.size() != (two ? 3u : 2u))
        throw ParseError(l.number, "gate " + name + " expects " + (two ? "2 qubit indices" : "1 qubit index"));
      sites(1, l.tokens.size());
      if (name == "I") u = gates::identity();
      else if (name == "X") u = gates::pauli_x();
      else if (name == "Y") u = gates::pauli_y();
      else if (name == "Z") u = gates::pauli_z();
      else if (name == "H") u = gates::hadamard();
      else if (name == "CNOT") u = gates::cnot();
      else if (name == "CZ") u = gates::cz();
      else if (name.rfind("RZ(", 0) == 0 && name.back() == ')') u = gates::rz(parse_real(name.substr(3, name.size() - 4), l.number));
      else throw ParseError(l.number, "unknown gate '" + name + "'");
    }
    try {
      c.add(u, support, name);
    } catch (const InputError& e) {
      throw ParseError(l.number, e.what());
    }
  }
  if (c.depth() == 0) throw ParseError(lines.back().number, "circuit has no gates");
  return c;
}

inline dqc::QuantumCircuit parse_circuit_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_circuit(ss);
}

inline dqc::QuantumCircuit load_circuit(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open circuit file '" + path + "'");
  return parse_circuit(f);
}

}  // namespace dissipative::io
