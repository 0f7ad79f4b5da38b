#pragma once

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "dissipative/core/random.hpp"
#include "dissipative/dse/channel.hpp"

namespace dissipative::dse {

struct ConvergenceRecord {
  int step = 0;
  double energy = 0.0;
  double overlap = 0.0;   // tr[Ψ ρ], Ψ the ground-space projector
  double distance = 0.0;  // trace distance to the previous step; NaN when not tracked
};

struct ConvergenceTrace {
  std::vector<ConvergenceRecord> records;
  bool converged = false;
  int steps = 0;  // channel applications until energy <= tol (or max_steps)
  DensityMatrix final_state;
};

struct ConvergenceOptions {
  bool track_distance = true;
  const Matrix* ground_projector = nullptr;  // recomputed from H when null
};

/// Iterate ρ <- T(ρ) until tr[Hρ] <= tol or max_steps applications.
inline ConvergenceTrace run_to_convergence(const CpMapChannel& ch, const FrustrationFreeHamiltonian& h, const DensityMatrix& rho0,
                                           double tol, int max_steps, const ConvergenceOptions& opt = {}) {
  detail::require(tol > 0.0, "run_to_convergence: tol must be positive");
  detail::require(max_steps >= 0, "run_to_convergence: max_steps must be non-negative");
  detail::require(rho0.system() == ch.system() && ch.system() == h.system(), "run_to_convergence: system mismatch");
  const Matrix hm = h.matrix();
  Matrix owned;
  if (!opt.ground_projector) owned = h.ground_projector();
  const Matrix& psi = opt.ground_projector ? *opt.ground_projector : owned;

  ConvergenceTrace tr;
  DensityMatrix rho = rho0;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  auto record = [&](int step, double dist) {
    tr.records.push_back({step, energy(hm, rho), energy(psi, rho), dist});
    return tr.records.back().energy;
  };
  double e = record(0, nan);
  int step = 0;
  while (e > tol && step < max_steps) {
    DensityMatrix next = ch.apply(rho);
    const double dist = opt.track_distance ? trace_distance(next, rho) : nan;
    rho = std::move(next);
    ++step;
    e = record(step, dist);
  }
  tr.converged = e <= tol;
  tr.steps = step;
  tr.final_state = rho;
  return tr;
}

/// Largest observed probability that a term, once found excited and
/// corrected, is found excited again. Branch k of `ch` must belong to term k
/// with P_k as its first Kraus operator (as built by dse_channel). When every
/// correction satisfies H K = 0 the answer 0 is returned without sampling.
inline double estimate_q(const CpMapChannel& ch, const FrustrationFreeHamiltonian& h, int samples, std::uint64_t seed) {
  detail::require(samples >= 1, "estimate_q: samples must be >= 1");
  detail::require(ch.branches().size() == h.size(), "estimate_q: channel branches must match Hamiltonian terms");
  const SiteSystem& sys = h.system();

  struct TermData {
    Matrix h, p;
    std::vector<Matrix> fix;  // correction Kraus operators, full size
    double replaced = -1.0;   // state-independent repeat probability of a depolarizing branch
  };
  std::vector<TermData> data;
  bool certified = true;
  for (std::size_t k = 0; k < h.size(); ++k) {
    const auto& b = ch.branches()[k];
    detail::require(!b.kraus.empty(), "estimate_q: branch without the P Kraus operator");
    TermData td;
    td.h = h.term_matrix(k);
    td.p = tensor_embed(b.kraus[0], sys).matrix();
    for (std::size_t i = 1; i < b.kraus.size(); ++i) {
      td.fix.push_back(tensor_embed(b.kraus[i], sys).matrix());
      if (detail::max_abs(td.h * td.fix.back()) > 1e-12) certified = false;
    }
    if (!b.replacements.empty()) {
      certified = false;
      // tr[H (σ ⊗ tr_λ(HρH))] / tr[Hρ] = tr[H_λ σ] when H acts on the support only.
      double q = 0.0;
      for (const auto& r : b.replacements) q += (h.terms()[k].matrix() * r.state).trace().real();
      td.replaced = q;
    }
    data.push_back(std::move(td));
  }
  if (certified) return 0.0;

  Rng rng(seed);
  std::vector<double> weights;
  for (const auto& b : ch.branches()) weights.push_back(b.probability);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const auto d = static_cast<Eigen::Index>(sys.total_dim());
  const int length = 4 * static_cast<int>(h.size());
  double q = 0.0;
  for (int s = 0; s < samples; ++s) {
    Vector psi = random_pure(d, rng);
    for (int step = 0; step < length; ++step) {
      const TermData& td = data[pick(rng)];
      const Vector excited = td.h * psi;
      const double p_neg = excited.squaredNorm();
      if (p_neg > 1e-12) {
        if (td.replaced >= 0.0) {
          q = std::max(q, td.replaced);
        } else {
          double again = 0.0;
          for (const auto& k : td.fix) again += (td.h * (k * psi)).squaredNorm();
          q = std::max(q, again / p_neg);
        }
      }
      if (td.replaced >= 0.0) break;  // mixed output; end this trajectory
      // Sample the measurement outcome and the correction.
      if (unit(rng) < p_neg) {
        std::vector<double> w;
        std::vector<Vector> outs;
        for (const auto& k : td.fix) {
          outs.push_back(k * psi);
          w.push_back(outs.back().squaredNorm());
        }
        std::discrete_distribution<std::size_t> which(w.begin(), w.end());
        psi = outs[which(rng)];
      } else {
        psi = td.p * psi;
      }
      const double n = psi.norm();
      if (n < 1e-300) break;
      psi /= n;
    }
  }
  return q;
}

}  // namespace dissipative::dse
