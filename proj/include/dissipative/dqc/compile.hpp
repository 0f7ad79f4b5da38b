#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "dissipative/dqc/circuit.hpp"
#include "dissipative/liouville/spectrum.hpp"

namespace dissipative::dqc {

enum class ClockEncoding { direct, unary };

struct CompileOptions {
  /// Rate of the qubit-reset jumps. 2 reproduces the closed-form gap.
  double reset_rate = 2.0;
  /// Unary encoding only: rate of the jumps repairing invalid clock strings.
  double repair_rate = 1.0;
  /// Unary encoding only: largest allowed Hilbert-space dimension.
  std::size_t max_unary_dim = 256;
};

struct CompiledDQC {
  LindbladModel model;
  ClockEncoding encoding = ClockEncoding::direct;
  int n_qubits = 0;
  int depth = 0;
  std::vector<int> clock_sites;

  std::string clock_site_map() const {
    std::string sites;
    for (int s : clock_sites) sites += (sites.empty() ? "" : ",") + std::to_string(s);
    if (encoding == ClockEncoding::direct)
      return "direct clock on site " + sites + " (levels 0.." + std::to_string(depth) + ")";
    return "unary clock on qubit sites " + sites + "; time t sets the first t+1 clock qubits to 1";
  }
};

/// Reset jumps sqrt(r) |0><1|_i ⊗ |0><0|_clock (one per qubit) and clock jumps
/// U_{t+1} ⊗ |t+1><t| + U_{t+1}^† ⊗ |t><t+1| for t = 0..T-1. The clock is the
/// last tensor factor.
inline CompiledDQC compile_direct(const QuantumCircuit& c, const CompileOptions& opt = {}) {
  const int n = c.n_qubits(), depth = c.depth();
  detail::require(depth >= 1, "compile_direct: circuit has no gates");
  detail::require(opt.reset_rate > 0.0, "compile_direct: reset rate must be positive");
  std::vector<int> dims(static_cast<std::size_t>(n), 2);
  dims.push_back(depth + 1);
  const SiteSystem sys(dims);
  const SiteSystem qubits = c.system();

  std::vector<Operator> jumps;
  const Matrix at_zero = gates::ket_bra(depth + 1, 0, 0);
  for (int i = 0; i < n; ++i) {
    const Matrix lower = tensor_embed(LocalOperator::on_qubits(gates::lowering(), {i}), qubits).matrix();
    jumps.emplace_back(std::sqrt(opt.reset_rate) * kron(lower, at_zero), sys);
  }
  for (int t = 0; t < depth; ++t) {
    const Matrix u = c.full_gate(t + 1);
    Matrix l = kron(u, gates::ket_bra(depth + 1, t + 1, t));
    l += kron(u.adjoint(), gates::ket_bra(depth + 1, t, t + 1));
    jumps.emplace_back(std::move(l), sys);
  }
  CompiledDQC out;
  out.model = LindbladModel(sys, std::nullopt, std::move(jumps));
  out.encoding = ClockEncoding::direct;
  out.n_qubits = n;
  out.depth = depth;
  out.clock_sites = {n};
  return out;
}

/// Unary clock: T+1 clock qubits c_0..c_T after the system qubits; time t is
/// the string with c_0..c_t set. Jumps:
///   reset    sqrt(r) σ-_i ⊗ |1><1|_{c0} ⊗ |0><0|_{c1}
///   clock    U ⊗ |1><1|_{ct} ⊗ σ+_{c(t+1)} ⊗ |0><0|_{c(t+2)} + U^† ⊗ (same with σ-)
///   repair   |0><0|_{c(q-1)} ⊗ σ-_{cq}, q = 1..T
///   boundary σ+_{c0}
/// The |0><0|_{c(t+2)} factor is dropped for t = T-1.
inline CompiledDQC compile_unary(const QuantumCircuit& c, const CompileOptions& opt = {}) {
  const int n = c.n_qubits(), depth = c.depth();
  detail::require(depth >= 1, "compile_unary: circuit has no gates");
  const int total = n + depth + 1;
  if (total >= 63 || (std::size_t{1} << total) > opt.max_unary_dim)
    throw BudgetExceeded("compile_unary: dimension 2^" + std::to_string(total) + " exceeds budget " +
                         std::to_string(opt.max_unary_dim));
  const SiteSystem sys = SiteSystem::qubits(total);
  auto clock = [n](int j) { return n + j; };
  auto embed_product = [&](const std::vector<std::pair<int, Matrix>>& factors) {
    std::vector<int> support;
    Matrix m = Matrix::Identity(1, 1);
    for (const auto& [site, op] : factors) {
      support.push_back(site);
      m = kron(m, op);
    }
    return tensor_embed(LocalOperator::on_qubits(m, support), sys).matrix();
  };
  auto embed_gate = [&](const Gate& g, bool dagger) {
    return tensor_embed(LocalOperator::on_qubits(dagger ? Matrix(g.unitary.adjoint()) : g.unitary, g.support), sys).matrix();
  };

  std::vector<Operator> jumps;
  for (int i = 0; i < n; ++i)
    jumps.emplace_back(std::sqrt(opt.reset_rate) *
                           embed_product({{i, gates::lowering()}, {clock(0), gates::proj1()}, {clock(1), gates::proj0()}}),
                       sys);
  for (int t = 0; t < depth; ++t) {
    std::vector<std::pair<int, Matrix>> fwd{{clock(t), gates::proj1()}, {clock(t + 1), gates::raising()}};
    std::vector<std::pair<int, Matrix>> bwd{{clock(t), gates::proj1()}, {clock(t + 1), gates::lowering()}};
    if (t + 2 <= depth) {
      fwd.emplace_back(clock(t + 2), gates::proj0());
      bwd.emplace_back(clock(t + 2), gates::proj0());
    }
    const Gate& g = c.gates()[static_cast<std::size_t>(t)];
    jumps.emplace_back(embed_gate(g, false) * embed_product(fwd) + embed_gate(g, true) * embed_product(bwd), sys);
  }
  for (int q = 1; q <= depth; ++q)
    jumps.emplace_back(std::sqrt(opt.repair_rate) * embed_product({{clock(q - 1), gates::proj0()}, {clock(q), gates::lowering()}}),
                       sys);
  jumps.emplace_back(std::sqrt(opt.repair_rate) * embed_product({{clock(0), gates::raising()}}), sys);

  CompiledDQC out;
  out.model = LindbladModel(sys, std::nullopt, std::move(jumps));
  out.encoding = ClockEncoding::unary;
  out.n_qubits = n;
  out.depth = depth;
  for (int j = 0; j <= depth; ++j) out.clock_sites.push_back(clock(j));
  return out;
}

inline Superoperator generator(const CompiledDQC& compiled) { return assemble_generator(compiled.model); }

/// rho_0 = 1/(T+1) Σ_t |psi_t><psi_t| ⊗ |t><t| in the direct layout.
inline DensityMatrix expected_fixed_point(const QuantumCircuit& c) {
  const int depth = c.depth();
  detail::require(depth >= 1, "expected_fixed_point: circuit has no gates");
  const auto hist = c.history();
  const auto dq = Eigen::Index{1} << c.n_qubits();
  Matrix rho = Matrix::Zero(dq * (depth + 1), dq * (depth + 1));
  for (int t = 0; t <= depth; ++t)
    rho += kron(hist[static_cast<std::size_t>(t)] * hist[static_cast<std::size_t>(t)].adjoint(),
                gates::ket_bra(depth + 1, t, t)) /
           static_cast<double>(depth + 1);
  std::vector<int> dims(static_cast<std::size_t>(c.n_qubits()), 2);
  dims.push_back(depth + 1);
  return DensityMatrix(Operator(rho, SiteSystem(dims)), DensityMatrix::Trusted{});
}

struct Readout {
  double p_final = 0.0;
  DensityMatrix psi_final;
};

/// Measure the clock of a direct-layout state and post-select on t = T.
inline Readout readout(const DensityMatrix& rho, const QuantumCircuit& c) {
  const int depth = c.depth();
  const auto dq = Eigen::Index{1} << c.n_qubits();
  detail::require(rho.dim() == dq * (depth + 1), "readout: state does not live on system ⊗ clock");
  Matrix block = Matrix::Zero(dq, dq);
  for (Eigen::Index a = 0; a < dq; ++a)
    for (Eigen::Index b = 0; b < dq; ++b) block(a, b) = rho.matrix()(a * (depth + 1) + depth, b * (depth + 1) + depth);
  const double p = block.trace().real();
  if (!(p >= 1e-12)) throw NumericalError("readout: probability of the final clock value is below 1e-12");
  return {p, DensityMatrix(Operator(block / p, c.system()), DensityMatrix::Trusted{})};
}

/// Isometry from the direct layout into the unary layout: |s, t> -> |s, 1^{t+1} 0^{T-t}>.
inline Matrix unary_embedding(int n_qubits, int depth) {
  const auto dq = Eigen::Index{1} << n_qubits;
  const int nc = depth + 1;
  Matrix v = Matrix::Zero(dq << nc, dq * nc);
  for (Eigen::Index s = 0; s < dq; ++s)
    for (int t = 0; t <= depth; ++t) {
      Eigen::Index clock_bits = 0;
      for (int j = 0; j < nc; ++j) clock_bits = (clock_bits << 1) | (j <= t ? 1 : 0);
      v((s << nc) | clock_bits, s * nc + t) = 1.0;
    }
  return v;
}

/// True for basis indices of the unary layout whose clock string is valid.
inline std::vector<char> unary_valid_mask(int n_qubits, int depth) {
  const Matrix v = unary_embedding(n_qubits, depth);
  std::vector<char> mask(static_cast<std::size_t>(v.rows()), 0);
  for (Eigen::Index c = 0; c < v.cols(); ++c)
    for (Eigen::Index r = 0; r < v.rows(); ++r)
      if (v(r, c) != cplx{}) mask[static_cast<std::size_t>(r)] = 1;
  return mask;
}

/// Project a unary-layout state onto valid clock strings and express it in the
/// direct layout. `weight` receives the probability on valid strings.
inline DensityMatrix restrict_to_valid_clock(const DensityMatrix& rho, const QuantumCircuit& c, double* weight = nullptr) {
  const Matrix v = unary_embedding(c.n_qubits(), c.depth());
  detail::require(rho.dim() == v.rows(), "restrict_to_valid_clock: state is not in the unary layout");
  const Matrix r = v.adjoint() * rho.matrix() * v;
  const double w = r.trace().real();
  if (weight) *weight = w;
  if (!(w > 1e-12)) throw NumericalError("restrict_to_valid_clock: no weight on valid clock states");
  std::vector<int> dims(static_cast<std::size_t>(c.n_qubits()), 2);
  dims.push_back(c.depth() + 1);
  return DensityMatrix(Operator(r / w, SiteSystem(dims)), DensityMatrix::Trusted{});
}

/// Eigenvalues of the generator restricted to vectorized operators with at
/// least one invalid clock index.
inline std::vector<cplx> unary_wrong_block_eigenvalues(const CompiledDQC& compiled) {
  detail::require(compiled.encoding == ClockEncoding::unary, "unary_wrong_block_eigenvalues: needs a unary model");
  const auto mask = unary_valid_mask(compiled.n_qubits, compiled.depth);
  const auto d = static_cast<Eigen::Index>(mask.size());
  std::vector<Eigen::Index> wrong;
  for (Eigen::Index col = 0; col < d; ++col)
    for (Eigen::Index row = 0; row < d; ++row)
      if (!(mask[static_cast<std::size_t>(row)] && mask[static_cast<std::size_t>(col)])) wrong.push_back(col * d + row);
  const Superoperator sop = generator(compiled);
  return eigenvalues(detail::submatrix(sop.matrix(), wrong, wrong));
}

/// Multiset comparison: max distance under a greedy nearest matching.
inline double spectrum_mismatch(std::vector<cplx> a, std::vector<cplx> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  auto key = [](cplx x, cplx y) { return x.real() != y.real() ? x.real() > y.real() : x.imag() > y.imag(); };
  std::sort(a.begin(), a.end(), key);
  std::sort(b.begin(), b.end(), key);
  std::vector<char> used(b.size(), 0);
  for (const cplx& x : a) {
    std::size_t best = b.size();
    double dist = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (used[j]) continue;
      const double dj = std::abs(b[j] - x);
      if (dj < dist) {
        dist = dj;
        best = j;
      }
    }
    used[best] = 1;
    worst = std::max(worst, dist);
  }
  return worst;
}

/// The spectrum does not depend on the gates: compare against the identity
/// circuit of the same shape.
inline bool gauge_transform_check(const QuantumCircuit& c, double tol = 1e-8, double* mismatch = nullptr) {
  const auto a = eigenvalues(generator(compile_direct(c)).matrix());
  const auto b = eigenvalues(generator(compile_direct(c.identity_like())).matrix());
  const double m = spectrum_mismatch(a, b);
  if (mismatch) *mismatch = m;
  return m <= tol;
}

/// |2(cos(pi/(2T+3)) - 1)|.
inline double closed_form_gap(int depth) {
  return 2.0 * (1.0 - std::cos(std::numbers::pi / (2.0 * depth + 3.0)));
}

}  // namespace dissipative::dqc
