#pragma once

#include <optional>
#include <vector>

#include "dissipative/dse/hamiltonian.hpp"
#include "dissipative/dse/pauli.hpp"
#include "dissipative/liouville/channel.hpp"

namespace dissipative::dse {

/// Corrections for one term: unitaries on the term's support, or the
/// completely depolarizing marker.
struct TermCorrection {
  double probability = 0.0;
  bool depolarizing = false;
  std::vector<Matrix> unitaries;  // each acts on the term's support, in its order
};

struct CorrectionSet {
  std::vector<TermCorrection> terms;

  /// Uniform p_λ = 1/#terms with the same unitaries for every term.
  static CorrectionSet uniform(std::size_t n_terms, const std::vector<std::vector<Matrix>>& unitaries) {
    detail::require(unitaries.size() == n_terms, "CorrectionSet: one unitary list per term");
    CorrectionSet c;
    for (const auto& u : unitaries) c.terms.push_back({1.0 / static_cast<double>(n_terms), false, u});
    return c;
  }
  static CorrectionSet depolarizing(std::size_t n_terms) {
    CorrectionSet c;
    for (std::size_t k = 0; k < n_terms; ++k) c.terms.push_back({1.0 / static_cast<double>(n_terms), true, {}});
    return c;
  }
};

/// T(ρ) = Σ_λ p_λ [P_λ ρ P_λ + (1/m) Σ_i U_{λ,i} H_λ ρ H_λ U_{λ,i}^†]; with the
/// depolarizing marker the second part is 1_λ/k ⊗ tr_λ[H_λ ρ H_λ]. Branch λ
/// holds P_λ as its first Kraus operator.
inline CpMapChannel dse_channel(const FrustrationFreeHamiltonian& h, const CorrectionSet& corr) {
  detail::require(corr.terms.size() == h.size(), "dse_channel: correction count does not match the number of terms");
  std::vector<ChannelBranch> branches;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto& term = h.terms()[k];
    const auto& c = corr.terms[k];
    const Matrix& hl = term.matrix();
    const Eigen::Index n = hl.rows();
    detail::require(c.probability > 0.0, "dse_channel: term probabilities must be positive");
    ChannelBranch b;
    b.probability = c.probability;
    b.kraus.emplace_back(Operator(Matrix::Identity(n, n) - hl, term.op().system()), term.support());
    if (c.depolarizing) {
      b.replacements.push_back({term.support(), hl, Matrix::Identity(n, n) / static_cast<double>(n)});
    } else {
      detail::require(!c.unitaries.empty(), "dse_channel: term " + std::to_string(k) + " has no correction");
      const double w = 1.0 / std::sqrt(static_cast<double>(c.unitaries.size()));
      for (const auto& u : c.unitaries) {
        detail::require(u.rows() == n && u.cols() == n, "dse_channel: correction does not match the term's support");
        detail::require(detail::max_abs(u.adjoint() * u - Matrix::Identity(n, n)) <= 1e-10, "dse_channel: correction is not unitary");
        b.kraus.emplace_back(Operator(w * u * hl, term.op().system()), term.support());
      }
    }
    branches.push_back(std::move(b));
  }
  double total = 0.0;
  for (const auto& b : branches) total += b.probability;
  detail::require(std::abs(total - 1.0) <= 1e-12, "dse_channel: term probabilities must sum to 1");
  return CpMapChannel(h.system(), std::move(branches));
}

/// Pauli form of a stabilizer term H = (1 - S)/2 (qubit supports only).
inline PauliString stabilizer_of(const LocalOperator& term) {
  const auto k = static_cast<int>(term.support().size());
  for (std::size_t i = 0; i < term.support().size(); ++i)
    detail::require(term.op().system().dim(i) == 2, "stabilizer term must act on qubits");
  const Eigen::Index n = term.matrix().rows();
  const Matrix s = Matrix::Identity(n, n) - 2.0 * term.matrix();
  PauliString p;
  if (!decompose_pauli(s, k, &p)) throw InputError("term is not of the form (1 - S)/2 for a Pauli string S");
  if (p.is_identity()) throw InputError("stabilizer is proportional to the identity; no anticommuting correction exists");
  return p;
}

/// Local unitary anticommuting with S on support position `pos`, embedded on
/// the whole support.
inline Matrix correction_on_support(const PauliString& s, std::size_t pos) {
  std::string ops(s.size(), 'I');
  ops[pos] = anticommuting_letter(s.ops()[pos]);
  return PauliString(ops).matrix();
}

/// A single-qubit Pauli U acting on the first non-identity site of S with
/// H U H = 0. Returned on that single site.
inline LocalOperator stabilizer_correction(const LocalOperator& term) {
  const PauliString s = stabilizer_of(term);
  const std::size_t pos = static_cast<std::size_t>(s.support().front());
  const Matrix full = correction_on_support(s, pos);
  const Matrix& h = term.matrix();
  if (detail::max_abs(h * full * h) > 1e-12) throw NumericalError("stabilizer_correction: H U H != 0");
  const char letter = anticommuting_letter(s.ops()[pos]);
  return LocalOperator::on_qubits(PauliString::letter_matrix(letter), {term.support()[pos]});
}

/// One anticommuting single-qubit Pauli per non-identity site of S, each on
/// the term's full support.
inline std::vector<Matrix> stabilizer_corrections(const LocalOperator& term) {
  const PauliString s = stabilizer_of(term);
  std::vector<Matrix> out;
  for (int pos : s.support()) out.push_back(correction_on_support(s, static_cast<std::size_t>(pos)));
  return out;
}

/// Single-correction set from stabilizer_correction, lifted to the supports.
inline CorrectionSet first_site_corrections(const FrustrationFreeHamiltonian& h) {
  std::vector<std::vector<Matrix>> us;
  for (const auto& t : h.terms()) {
    const PauliString s = stabilizer_of(t);
    us.push_back({correction_on_support(s, static_cast<std::size_t>(s.support().front()))});
  }
  return CorrectionSet::uniform(h.size(), us);
}

/// All-site stabilizer corrections for every term.
inline CorrectionSet all_site_corrections(const FrustrationFreeHamiltonian& h) {
  std::vector<std::vector<Matrix>> us;
  for (const auto& t : h.terms()) us.push_back(stabilizer_corrections(t));
  return CorrectionSet::uniform(h.size(), us);
}

}  // namespace dissipative::dse
