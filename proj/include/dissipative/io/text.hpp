#pragma once

#include <charconv>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "dissipative/core/types.hpp"

namespace dissipative::io {

/// Parse failure carrying the 1-based line number.
class ParseError : public InputError {
 public:
  ParseError(int line, const std::string& what)
      : InputError("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Line {
  int number;
  std::vector<std::string> tokens;
};

/// Non-empty lines split on whitespace; '#' starts a comment.
inline std::vector<Line> tokenize(std::istream& in) {
  std::vector<Line> out;
  std::string raw;
  int number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (auto hash = raw.find('#'); hash != std::string::npos) raw.erase(hash);
    std::istringstream ss(raw);
    Line l{number, {}};
    for (std::string tok; ss >> tok;) l.tokens.push_back(tok);
    if (!l.tokens.empty()) out.push_back(std::move(l));
  }
  return out;
}

inline double parse_real(const std::string& s, int line) {
  double v = 0.0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ParseError(line, "expected a number, got '" + s + "'");
  return v;
}

inline int parse_int(const std::string& s, int line) {
  int v = 0;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc{} || ptr != end) throw ParseError(line, "expected an integer, got '" + s + "'");
  return v;
}

/// "re" or "(re,im)".
inline cplx parse_complex(const std::string& s, int line) {
  if (s.size() >= 2 && s.front() == '(' && s.back() == ')') {
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw ParseError(line, "complex entry needs the form (re,im): '" + s + "'");
    return {parse_real(s.substr(1, comma - 1), line), parse_real(s.substr(comma + 1, s.size() - comma - 2), line)};
  }
  return {parse_real(s, line), 0.0};
}

/// n*n entries in row-major order.
inline Matrix parse_matrix(const std::vector<std::string>& toks, std::size_t first, Eigen::Index n, int line) {
  if (toks.size() - first != static_cast<std::size_t>(n * n))
    throw ParseError(line, "expected " + std::to_string(n * n) + " matrix entries, got " + std::to_string(toks.size() - first));
  Matrix m(n, n);
  for (Eigen::Index i = 0; i < n * n; ++i) m(i / n, i % n) = parse_complex(toks[first + static_cast<std::size_t>(i)], line);
  return m;
}

}  // namespace dissipative::io
