#pragma once

#include <fstream>
#include <set>
#include <sstream>

#include "dissipative/io/text.hpp"
#include "dissipative/mps/mps.hpp"

namespace dissipative::io {

/// MPS text format:
///
///   mps <d> <D> <N>
///   A 0 : <D*D entries, row-major, real or (re,im)>
///   ...
///   A <d-1> : ...
///
/// or one preset line: `preset aklt|ghz|w <N>`.
inline mps::MatrixProductState parse_mps(std::istream& in) {
  const auto lines = tokenize(in);
  if (lines.empty()) throw ParseError(1, "empty MPS description");
  const Line& head = lines.front();
  const auto& h = head.tokens;
  auto wrap = [](int line, auto&& f) {
    try {
      return f();
    } catch (const ParseError&) {
      throw;
    } catch (const InputError& e) {
      throw ParseError(line, e.what());
    }
  };

  if (h[0] == "preset") {
    if (h.size() != 3) throw ParseError(head.number, "usage: preset aklt|ghz|w <N>");
    if (lines.size() > 1) throw ParseError(lines[1].number, "nothing may follow a preset");
    const int n = parse_int(h[2], head.number);
    return wrap(head.number, [&] {
      if (h[1] == "aklt") return mps::aklt(n);
      if (h[1] == "ghz") return mps::ghz(n);
      if (h[1] == "w") return mps::w_like(n);
      throw ParseError(head.number, "unknown MPS preset '" + h[1] + "'");
    });
  }
  if (h[0] != "mps" || h.size() != 4) throw ParseError(head.number, "first statement must be 'mps <d> <D> <N>' or 'preset ...'");
  const int d = parse_int(h[1], head.number), bond = parse_int(h[2], head.number), n = parse_int(h[3], head.number);
  if (d < 1 || bond < 1) throw ParseError(head.number, "d and D must be >= 1");

  std::vector<Matrix> tensors(static_cast<std::size_t>(d));
  std::set<int> seen;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const Line& l = lines[li];
    const auto& t = l.tokens;
    if (t[0] != "A" || t.size() < 3 || t[2] != ":") throw ParseError(l.number, "expected 'A <index> : <entries>'");
    const int i = parse_int(t[1], l.number);
    if (i < 0 || i >= d) throw ParseError(l.number, "tensor index out of range");
    if (!seen.insert(i).second) throw ParseError(l.number, "tensor " + std::to_string(i) + " given twice");
    tensors[static_cast<std::size_t>(i)] = parse_matrix(t, 3, bond, l.number);
  }
  if (static_cast<int>(seen.size()) != d) throw ParseError(lines.back().number, "expected " + std::to_string(d) + " tensors");
  return wrap(head.number, [&] { return mps::MatrixProductState(tensors, n); });
}

inline mps::MatrixProductState parse_mps_string(const std::string& text) {
  std::istringstream ss(text);
  return parse_mps(ss);
}

inline mps::MatrixProductState load_mps(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InputError("cannot open MPS file '" + path + "'");
  return parse_mps(f);
}

}  // namespace dissipative::io
