#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "dissipative/core/random.hpp"
#include "dissipative/liouville/channel.hpp"
#include "dissipative/mps/mps.hpp"

namespace dissipative::mps {

inline int log2_exact(int n) {
  detail::require(n >= 2 && (n & (n - 1)) == 0, "N must be a power of two >= 2, got " + std::to_string(n));
  int k = 0;
  while ((1 << k) < n) ++k;
  return k;
}

/// M = C N^2, ε_{r+1} = 1/M^r (r = 1..n), L_r = 1/(2 ε_{r+1}).
struct ScheduleParams {
  double C = 50.0;
  int N = 4;

  ScheduleParams() = default;
  ScheduleParams(double c, int n_sites) : C(c), N(n_sites) { validate(); }

  void validate() const {
    detail::require(C > 0.0 && std::isfinite(C), "ScheduleParams: C must be positive");
    detail::require(std::pow(C * N * N, levels()) < 1e300, "ScheduleParams: C N^2 too large");
  }
  int levels() const { return log2_exact(N); }
  double M() const { return C * N * N; }

  /// ε_r for r = 2..n+1.
  double eps(int r) const {
    detail::require(r >= 2 && r <= levels() + 1, "ScheduleParams: ε_r defined for 2 <= r <= n+1");
    return std::pow(M(), -(r - 1));
  }
  double repetitions(int r) const {
    detail::require(r >= 1 && r <= levels(), "ScheduleParams: L_r defined for 1 <= r <= n");
    return 1.0 / (2.0 * eps(r + 1));
  }

  /// ⌈N^{log2 N + log2 C}⌉ = ⌈(N C)^{log2 N}⌉, capped at 10^6.
  long long step_budget(long long cap = 1000000) const {
    const double raw = std::pow(static_cast<double>(N) * C, levels());
    const double rounded = std::round(raw);
    const double v = std::abs(raw - rounded) <= 1e-9 * raw ? rounded : std::ceil(raw);
    return v >= static_cast<double>(cap) ? cap : static_cast<long long>(v);
  }
};

/// Target state and its pair projectors, shared by every channel below.
struct PreparationTarget {
  MatrixProductState mps;
  Vector psi;
  PairProjectors pair;
  SiteSystem system;
};

inline PreparationTarget make_target(const MatrixProductState& mps, std::size_t max_dim = 1u << 16) {
  log2_exact(mps.n_sites);
  PreparationTarget t;
  t.mps = mps;
  t.pair = pair_projectors(mps);
  t.psi = mps_to_state(mps, max_dim);
  t.system = mps.system();
  return t;
}

/// R on the pair (k, k+1), k 1-based with N+1 ≡ 1:
/// X ↦ P X P + (P / D^2) tr_pair(H X).
inline CpMapChannel pair_channel(const PreparationTarget& t, int k) {
  const int n = t.mps.n_sites;
  detail::require(k >= 1 && k <= n, "pair_channel: pair index out of range");
  const std::vector<int> sup{k - 1, k % n};
  const std::vector<int> dims{t.mps.d, t.mps.d};
  ChannelBranch b;
  b.kraus.emplace_back(t.pair.P, sup, dims);
  b.replacements.push_back({sup, t.pair.H, t.pair.P / static_cast<double>(t.mps.D * t.mps.D)});
  return CpMapChannel(t.system, {b}, 1e-10);
}

/// Pair acted on by R_{r,c}: k = 2^{r-1}(2c - 1); R_{n,2} is the ring-closing pair (N, 1).
inline int pair_index(const PreparationTarget& t, int r, int c) {
  const int n = log2_exact(t.mps.n_sites);
  detail::require(r >= 1 && r <= n && c >= 1, "channel_R: invalid (r, c)");
  if (r == n && c == 2) return t.mps.n_sites;
  const long long k = (1LL << (r - 1)) * (2LL * c - 1);
  detail::require(k <= t.mps.n_sites - 1, "channel_R: k = 2^(r-1)(2c-1) beyond the last internal pair");
  return static_cast<int>(k);
}

inline CpMapChannel channel_R(const PreparationTarget& t, int r, int c) { return pair_channel(t, pair_index(t, r, c)); }

/// S_{1,c} = R_{1,c}; S_{r,c} = (1-ε_r)/2 (S_{r-1,2c-1} + S_{r-1,2c}) + ε_r R_{r,c}.
/// Children (2c-1, 2c) keep each S_{r,c} on the contiguous block of 2^r sites.
inline CpMapChannel channel_S(const PreparationTarget& t, int r, int c, const ScheduleParams& p) {
  const int n = log2_exact(t.mps.n_sites);
  detail::require(p.N == t.mps.n_sites, "channel_S: schedule built for a different N");
  detail::require(r >= 1 && r <= n, "channel_S: r out of range");
  detail::require(c >= 1 && c <= (1 << (n - r)), "channel_S: c out of range");
  if (r == 1) return channel_R(t, 1, c);
  const double e = p.eps(r);
  return CpMapChannel::mixture({{(1.0 - e) / 2.0, channel_S(t, r - 1, 2 * c - 1, p)},
                                {(1.0 - e) / 2.0, channel_S(t, r - 1, 2 * c, p)},
                                {e, channel_R(t, r, c)}});
}

/// T = (1 - ε_{n+1}) S_{n,1} + ε_{n+1} R_{n,2}.
inline CpMapChannel channel_T(const PreparationTarget& t, const ScheduleParams& p) {
  const int n = log2_exact(t.mps.n_sites);
  const double e = p.eps(n + 1);
  return CpMapChannel::mixture({{1.0 - e, channel_S(t, n, 1, p)}, {e, channel_R(t, n, 2)}});
}

/// q_r for r = 1..n+1: projector onto the complement of the kernel of Σ_{k < 2^r} H_k
/// (k 1-based, pairs capped at the N ring pairs).
inline std::vector<Matrix> level_projectors(const PreparationTarget& t) {
  const int n = log2_exact(t.mps.n_sites);
  const auto dim = static_cast<Eigen::Index>(t.system.total_dim());
  const std::vector<int> dims{t.mps.d, t.mps.d};
  std::vector<Matrix> out;
  Matrix h = Matrix::Zero(dim, dim);
  int added = 0;
  for (int r = 1; r <= n + 1; ++r) {
    const int upto = std::min((1 << r) - 1, t.mps.n_sites);
    for (; added < upto; ++added) {
      const LocalLayout layout(t.system, {added, (added + 1) % t.mps.n_sites});
      const auto rest = static_cast<Eigen::Index>(layout.rest_dim());
      layout.add_placed(h, 1.0, t.pair.H, Matrix::Identity(rest, rest));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    Eigen::Index k = 0;
    while (k < dim && es.eigenvalues()(k) <= dse::kGroundTol) ++k;
    const Matrix v = es.eigenvectors().rightCols(dim - k);
    out.push_back(v * v.adjoint());
  }
  return out;
}

/// μ_r = tr[q_r ρ], r = 1..n+1.
struct LevelErrorTrace {
  std::vector<double> mu;
};

inline LevelErrorTrace level_errors(const Matrix& rho, const std::vector<Matrix>& q) {
  LevelErrorTrace out;
  for (const auto& qr : q) out.mu.push_back(std::clamp((qr * rho).trace().real(), 0.0, 1.0));
  return out;
}

inline LevelErrorTrace level_errors(const DensityMatrix& rho, const MatrixProductState& mps) {
  return level_errors(rho.matrix(), level_projectors(make_target(mps)));
}

enum class IterationMode { automatic, deterministic, stochastic };

struct PreparationOptions {
  long long max_steps = -1;          // schedule budget when negative
  double stop_fidelity = 2.0;        // never stop early by default
  long long record_every = 1;
  IterationMode mode = IterationMode::automatic;
  std::size_t max_superoperator_dim = 1u << 16;  // deterministic when dim^2 fits
  int trajectories = 200;
  std::uint64_t seed = 1;
  bool track_levels = true;
};

struct PreparationRecord {
  long long step = 0;
  double fidelity = 0.0;
  double fidelity_stderr = 0.0;  // zero in deterministic mode
  std::vector<double> mu;
};

struct PreparationResult {
  std::vector<PreparationRecord> records;
  long long steps = 0;
  bool stochastic = false;
  double final_fidelity = 0.0;
  Matrix final_state;  // deterministic mode only
};

namespace detail_prep {

inline bool record_now(long long step, long long total, long long every) { return step == total || step % every == 0; }

}  // namespace detail_prep

/// Iterate T from the maximally mixed state.
inline PreparationResult prepare(const PreparationTarget& t, const ScheduleParams& p, const PreparationOptions& opt = {}) {
  detail::require(opt.record_every >= 1, "prepare: record_every must be >= 1");
  const CpMapChannel ch = channel_T(t, p);
  const long long total = opt.max_steps >= 0 ? opt.max_steps : p.step_budget();
  const auto dim = static_cast<Eigen::Index>(t.system.total_dim());
  const bool stochastic = opt.mode == IterationMode::stochastic ||
                          (opt.mode == IterationMode::automatic &&
                           static_cast<double>(dim) * static_cast<double>(dim) > static_cast<double>(opt.max_superoperator_dim));
  const std::vector<Matrix> q = opt.track_levels ? level_projectors(t) : std::vector<Matrix>{};

  PreparationResult res;
  res.stochastic = stochastic;
  if (!stochastic) {
    Matrix rho = Matrix::Identity(dim, dim) / static_cast<double>(dim);
    for (long long step = 0;; ++step) {
      if (detail_prep::record_now(step, total, opt.record_every) || step == 0) {
        PreparationRecord rec{step, (t.psi.adjoint() * rho * t.psi)(0, 0).real(), 0.0, {}};
        if (!q.empty()) rec.mu = level_errors(rho, q).mu;
        res.records.push_back(std::move(rec));
        if (res.records.back().fidelity >= opt.stop_fidelity) {
          res.steps = step;
          break;
        }
      }
      if (step == total) {
        res.steps = step;
        break;
      }
      rho = ch.apply(rho);
      rho = 0.5 * (rho + rho.adjoint());
    }
    res.final_fidelity = res.records.back().fidelity;
    res.final_state = std::move(rho);
    return res;
  }

  // Pure-state unraveling: each R branch has outcomes P and (1/D)|φ_a><ψ_b|.
  detail::require(opt.trajectories >= 2, "prepare: need at least two trajectories");
  const int d2 = t.mps.D * t.mps.D;
  Eigen::SelfAdjointEigenSolver<Matrix> es(t.pair.P);
  const Matrix range = es.eigenvectors().rightCols(d2);
  const Matrix kernel = es.eigenvectors().leftCols(es.eigenvectors().cols() - d2);
  std::vector<double> weights;
  std::vector<std::shared_ptr<const LocalLayout>> layouts;
  for (const auto& b : ch.branches()) {
    weights.push_back(b.probability);
    layouts.push_back(std::make_shared<const LocalLayout>(t.system, b.kraus.front().support()));
  }
  std::vector<long long> rec_steps;
  for (long long s = 0; s <= total; ++s)
    if (s == 0 || detail_prep::record_now(s, total, opt.record_every)) rec_steps.push_back(s);
  std::vector<double> sum(rec_steps.size(), 0.0), sum_sq(rec_steps.size(), 0.0);
  std::vector<std::vector<double>> mu_sum(rec_steps.size(), std::vector<double>(q.size(), 0.0));

  Rng rng(opt.seed);
  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<Eigen::Index> any_a(0, d2 - 1);
  for (int traj = 0; traj < opt.trajectories; ++traj) {
    Vector psi = random_pure(dim, rng);  // E|ψ><ψ| = 1/dim
    std::size_t ri = 0;
    for (long long step = 0; step <= total; ++step) {
      if (ri < rec_steps.size() && rec_steps[ri] == step) {
        const double f = std::norm(t.psi.dot(psi));
        sum[ri] += f;
        sum_sq[ri] += f * f;
        for (std::size_t l = 0; l < q.size(); ++l) mu_sum[ri][l] += psi.dot(q[l] * psi).real();
        ++ri;
      }
      if (step == total) break;
      const auto& lay = *layouts[pick(rng)];
      const Matrix x = psi;  // column vector as a dim x 1 "operator"
      const Vector kept = lay.left(t.pair.P, x).col(0);
      const double p_keep = kept.squaredNorm();
      if (unit(rng) < p_keep) {
        psi = kept / std::sqrt(p_keep);
      } else {
        // Outcome b in range(H) with probability ||<ψ_b|ψ>||^2, then |φ_a> uniformly.
        std::vector<Vector> rests;
        std::vector<double> w;
        for (Eigen::Index b = 0; b < kernel.cols(); ++b) {
          const Matrix proj = range.col(0) * kernel.col(b).adjoint();  // |φ_0><ψ_b|
          rests.push_back(lay.left(proj, x).col(0));
          w.push_back(rests.back().squaredNorm());
        }
        std::discrete_distribution<std::size_t> which(w.begin(), w.end());
        const std::size_t b = which(rng);
        const Eigen::Index a = any_a(rng);
        const Matrix move = range.col(a) * range.col(0).adjoint();
        psi = lay.left(move, Matrix(rests[b])).col(0);
        psi /= psi.norm();
      }
    }
  }
  const double m = opt.trajectories;
  for (std::size_t i = 0; i < rec_steps.size(); ++i) {
    PreparationRecord rec;
    rec.step = rec_steps[i];
    rec.fidelity = sum[i] / m;
    const double var = std::max(0.0, (sum_sq[i] / m - rec.fidelity * rec.fidelity) * m / (m - 1.0));
    rec.fidelity_stderr = std::sqrt(var / m);
    for (double v : mu_sum[i]) rec.mu.push_back(v / m);
    res.records.push_back(std::move(rec));
  }
  res.steps = total;
  res.final_fidelity = res.records.back().fidelity;
  return res;
}

}  // namespace dissipative::mps
