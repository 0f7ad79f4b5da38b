#pragma once

#include <cmath>
#include <vector>

#include "dissipative/core/gates.hpp"
#include "dissipative/core/ops.hpp"
#include "dissipative/core/parallel.hpp"
#include "dissipative/liouville/evolve.hpp"
#include "dissipative/liouville/spectrum.hpp"

namespace dissipative::reservoir {

/// Target jump L on the system, coupling Ω, ancilla decay Γ.
struct AncillaEmbedding {
  Operator target;
  double omega = 1.0;
  double gamma = 100.0;

  void validate() const {
    detail::require(omega >= 0.0 && std::isfinite(omega), "AncillaEmbedding: omega must be >= 0");
    detail::require(gamma > 0.0 && std::isfinite(gamma), "AncillaEmbedding: gamma must be > 0");
  }
  /// Elimination diagnostics are only meaningful for Γ >= Ω.
  bool in_elimination_regime() const { return gamma >= omega; }
};

/// System ⊗ one qubit ancilla per target (ancillas last):
/// H = Ω Σ_j (L_j^† ⊗ σ-_j + L_j ⊗ σ+_j), jumps √Γ σ-_j.
inline LindbladModel embed_all(const SiteSystem& system, const std::vector<Operator>& targets, double omega, double gamma,
                               std::size_t max_dim = 1024) {
  detail::require(!targets.empty(), "embed: no target jumps");
  std::vector<int> dims = system.dims();
  for (std::size_t j = 0; j < targets.size(); ++j) dims.push_back(2);
  const SiteSystem full(dims);
  if (full.total_dim() > max_dim) throw BudgetExceeded("embed: system plus ancillas exceed dimension budget " + std::to_string(max_dim));
  const auto dim = static_cast<Eigen::Index>(full.total_dim());
  Matrix h = Matrix::Zero(dim, dim);
  std::vector<Operator> jumps;
  std::vector<int> sys_sites(system.size());
  for (std::size_t s = 0; s < system.size(); ++s) sys_sites[s] = static_cast<int>(s);
  for (std::size_t j = 0; j < targets.size(); ++j) {
    const Operator& l = targets[j];
    detail::require(l.system() == system, "embed: target does not act on the system");
    const int anc = static_cast<int>(system.size() + j);
    std::vector<int> sup = sys_sites;
    sup.push_back(anc);
    std::vector<int> local_dims = system.dims();
    local_dims.push_back(2);
    const Matrix coupling = kron(l.matrix().adjoint(), gates::lowering()) + kron(l.matrix(), gates::raising());
    h += omega * tensor_embed(LocalOperator(coupling, sup, local_dims), full).matrix();
    jumps.push_back(std::sqrt(gamma) * tensor_embed(LocalOperator::on_qubits(gates::lowering(), {anc}), full));
  }
  return LindbladModel(full, Operator(0.5 * (h + h.adjoint()), full), std::move(jumps));
}

inline LindbladModel embed(const AncillaEmbedding& e, std::size_t max_dim = 1024) {
  e.validate();
  return embed_all(e.target.system(), {e.target}, e.omega, e.gamma, max_dim);
}

/// Single-system model with jumps √rate L_j.
inline LindbladModel effective_model(const SiteSystem& system, const std::vector<Operator>& targets, double rate) {
  detail::require(rate >= 0.0, "effective_model: rate must be >= 0");
  std::vector<Operator> jumps;
  for (const auto& l : targets) jumps.push_back(std::sqrt(rate) * l);
  return LindbladModel(system, std::nullopt, std::move(jumps));
}

/// ρ_sys ⊗ |0...0><0...0| on the ancillas.
inline Matrix with_ground_ancillas(const Matrix& rho_sys, std::size_t n_ancilla) {
  Matrix out = rho_sys;
  for (std::size_t j = 0; j < n_ancilla; ++j) out = kron(out, gates::proj0());
  return out;
}

inline Matrix reduce_to_system(const Matrix& rho_full, const SiteSystem& full, std::size_t n_system_sites) {
  std::vector<int> anc;
  for (std::size_t s = n_system_sites; s < full.size(); ++s) anc.push_back(static_cast<int>(s));
  return partial_trace(Operator(rho_full, full), anc).matrix();
}

/// Max trace distance on [0, horizon] (samples + 1 evenly spaced points)
/// between the reduced embedded evolution and the effective model.
inline double reduced_mismatch(const LindbladModel& full, std::size_t n_system_sites, const LindbladModel& eff,
                               const Matrix& rho_sys, double horizon, int samples = 200) {
  detail::require(horizon > 0.0 && samples >= 1, "reduced_mismatch: need a positive horizon and samples");
  const std::size_t n_anc = full.system.size() - n_system_sites;
  const double dt = horizon / samples;
  const Propagator pf(assemble_generator(full), dt), pe(assemble_generator(eff), dt);
  Matrix x = with_ground_ancillas(rho_sys, n_anc), y = rho_sys;
  double worst = 0.0;
  for (int i = 0; i <= samples; ++i) {
    if (i > 0) {
      x = pf.apply(x);
      y = pe.apply(y);
    }
    const Matrix r = reduce_to_system(x, full.system, n_system_sites);
    const DensityMatrix a(Operator(0.5 * (r + r.adjoint()), eff.system), DensityMatrix::Trusted{});
    const DensityMatrix b(Operator(0.5 * (y + y.adjoint()), eff.system), DensityMatrix::Trusted{});
    worst = std::max(worst, trace_distance(a, b));
  }
  return worst;
}

struct EliminationReport {
  double omega = 0.0;
  double gamma = 0.0;
  double fitted_rate = 0.0;     // κ in the effective jump √κ L
  double rate_constant = 0.0;   // κ Γ / Ω²
  double fit_start = 0.0;
  double fit_end = 0.0;
  double horizon = 0.0;         // mismatch window
  double max_trace_distance = 0.0;
  double steady_state_distance = 0.0;
};

struct EliminationOptions {
  double horizon = 0.0;  // 0: 5 / fitted rate
  int fit_samples = 200;
  int mismatch_samples = 200;
  double decay_factor = 5.0;  // fit window ends once the signal fell by e^-decay_factor
};

namespace detail_fit {

struct DecayFit {
  double rate = 0.0;
  double span = 0.0;
};

/// Log-linear fit of signal(x(t)) from x0 over a window that ends once the
/// signal has fallen by e^-decay_factor (found by doubling).
template <class Signal>
DecayFit fit_decay(const Superoperator& gen, const Matrix& x0, Signal signal, double first_span, double t_cap,
                   const EliminationOptions& opt) {
  const double s0 = signal(x0);
  if (!(s0 > 1e-12)) throw NumericalError("elimination_check: no decaying signal after the transient");
  DecayFit fit;
  fit.span = first_span;
  while (true) {
    const double s = signal(Propagator(gen, fit.span).apply(x0));
    if (s <= std::exp(-opt.decay_factor) * s0) break;
    fit.span *= 2.0;
    if (fit.span > t_cap) throw NumericalError("elimination_check: insufficient decay within the time cap");
  }
  const double dt = fit.span / (opt.fit_samples - 1);
  const Propagator step(gen, dt);
  Matrix x = x0;
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  int used = 0;
  for (int i = 0; i < opt.fit_samples; ++i) {
    if (i > 0) x = step.apply(x);
    const double s = signal(x);
    if (s <= 1e-14) break;
    const double t = i * dt, y = std::log(s);
    st += t;
    sy += y;
    stt += t * t;
    sty += t * y;
    ++used;
  }
  if (used < 3) throw NumericalError("elimination_check: too few usable fit points");
  const double slope = (used * sty - st * sy) / (used * stt - st * st);
  if (!(slope < 0.0)) throw NumericalError("elimination_check: fitted signal does not decay");
  fit.rate = -slope;
  return fit;
}

}  // namespace detail_fit

/// Fit κ in the effective jump √κ L. The signal is ⟨L^†L⟩ - ⟨L^†L⟩_∞ of the
/// reduced state, started from the top eigenvector of L^†L with the ancilla
/// in |0> and skipping the first 5/Γ; its decay rate is divided by the rate of
/// the same signal under the unit-rate effective model.
inline EliminationReport elimination_check(const AncillaEmbedding& e, const EliminationOptions& opt = {}) {
  e.validate();
  detail::require(e.omega > 0.0, "elimination_check: omega must be > 0");
  detail::require(opt.fit_samples >= 3, "elimination_check: need at least three fit samples");
  const SiteSystem& sys = e.target.system();
  const LindbladModel full = embed(e);
  const Superoperator gen = assemble_generator(full);
  const Matrix obs = e.target.matrix().adjoint() * e.target.matrix();
  Eigen::SelfAdjointEigenSolver<Matrix> es(obs);
  const Vector top = es.eigenvectors().col(es.eigenvectors().cols() - 1);
  const Matrix rho_sys = top * top.adjoint();

  const Matrix ss_sys = reduce_to_system(steady_states(gen).front().matrix(), full.system, sys.size());
  const double full_inf = (obs * ss_sys).trace().real();
  const Superoperator unit = assemble_generator(effective_model(sys, {e.target}, 1.0));
  const DensityMatrix unit_ss = steady_states(unit).front();
  const double unit_inf = (obs * unit_ss.matrix()).trace().real();

  EliminationReport rep;
  rep.omega = e.omega;
  rep.gamma = e.gamma;
  rep.fit_start = 5.0 / e.gamma;
  const Matrix x0 = Propagator(gen, rep.fit_start).apply(with_ground_ancillas(rho_sys, 1));
  const double t_cap = 1e4 * e.gamma / (e.omega * e.omega);
  const auto full_fit = detail_fit::fit_decay(
      gen, x0, [&](const Matrix& x) { return (obs * reduce_to_system(x, full.system, sys.size())).trace().real() - full_inf; },
      1.0 / e.gamma, t_cap, opt);
  const auto unit_fit = detail_fit::fit_decay(
      unit, rho_sys, [&](const Matrix& x) { return (obs * x).trace().real() - unit_inf; }, 1e-2, 1e6, opt);
  rep.fit_end = rep.fit_start + full_fit.span;
  rep.fitted_rate = full_fit.rate / unit_fit.rate;
  rep.rate_constant = rep.fitted_rate * e.gamma / (e.omega * e.omega);

  const LindbladModel eff = effective_model(sys, {e.target}, rep.fitted_rate);
  rep.horizon = opt.horizon > 0.0 ? opt.horizon : 5.0 / rep.fitted_rate;
  rep.max_trace_distance = reduced_mismatch(full, sys.size(), eff, rho_sys, rep.horizon, opt.mismatch_samples);
  const DensityMatrix a(Operator(ss_sys, sys), DensityMatrix::Trusted{});
  rep.steady_state_distance = trace_distance(a, unit_ss);  // steady state does not depend on κ
  return rep;
}

struct SweepReport {
  std::vector<EliminationReport> points;
  double exponent = 0.0;  // slope of log κ against log Γ
  bool mismatch_decreasing = false;
};

/// Γ = ratio · Ω for each ratio; points ordered as given.
inline SweepReport elimination_sweep(const Operator& target, double omega, const std::vector<double>& ratios,
                                     const EliminationOptions& opt = {}, unsigned threads = 1) {
  detail::require(ratios.size() >= 2, "elimination_sweep: need at least two grid points");
  SweepReport rep;
  rep.points = parallel_map(
      ratios.size(), [&](std::size_t i) { return elimination_check(AncillaEmbedding{target, omega, ratios[i] * omega}, opt); }, threads);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  const double n = static_cast<double>(rep.points.size());
  for (const auto& p : rep.points) {
    const double lx = std::log(p.gamma), ly = std::log(p.fitted_rate);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  rep.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.mismatch_decreasing = true;
  for (std::size_t i = 1; i < rep.points.size(); ++i)
    if ((rep.points[i].gamma > rep.points[i - 1].gamma) && rep.points[i].max_trace_distance > rep.points[i - 1].max_trace_distance)
      rep.mismatch_decreasing = false;
  return rep;
}

}  // namespace dissipative::reservoir
