#pragma once

#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "dissipative/core/local_action.hpp"
#include "dissipative/liouville/superoperator.hpp"

namespace dissipative {

/// X ↦ state ⊗ tr_support(filter X filter^†). `state` and `filter` act on the
/// support; the output is placed on the support with the reduced operator on
/// the remaining sites.
struct ReplacementTerm {
  std::vector<int> support;
  Matrix filter;
  Matrix state;
};

/// One probabilistic branch of a channel: p · (Σ_i K_i X K_i^† + Σ replacements).
struct ChannelBranch {
  double probability = 1.0;
  std::vector<LocalOperator> kraus;
  std::vector<ReplacementTerm> replacements;
};

/// Completely positive trace-preserving map given as a probabilistic mixture
/// of Kraus sets (optionally with trace-and-replace terms, which are Kraus
/// families written compactly).
class CpMapChannel {
 public:
  CpMapChannel() = default;

  CpMapChannel(SiteSystem system, std::vector<ChannelBranch> branches, double tol = 1e-9)
      : system_(std::move(system)), branches_(std::move(branches)) {
    detail::require(!branches_.empty(), "CpMapChannel: no branches");
    double total = 0.0;
    for (const auto& b : branches_) {
      detail::require(b.probability >= 0.0, "CpMapChannel: negative branch probability");
      total += b.probability;
    }
    detail::require(std::abs(total - 1.0) <= 1e-12, "CpMapChannel: branch probabilities must sum to 1");
    compile();
    const double defect = trace_defect();
    detail::require(defect <= tol, "CpMapChannel: not trace preserving (defect " + std::to_string(defect) + ")");
  }

  static CpMapChannel identity(const SiteSystem& s) {
    const auto d = s.dim(0);
    ChannelBranch b;
    b.kraus.emplace_back(Matrix::Identity(d, d), std::vector<int>{0}, std::vector<int>{d});
    return CpMapChannel(s, {b});
  }

  /// Σ_j w_j ch_j with Σ w_j = 1.
  static CpMapChannel mixture(const std::vector<std::pair<double, CpMapChannel>>& parts) {
    detail::require(!parts.empty(), "CpMapChannel::mixture: no parts");
    std::vector<ChannelBranch> branches;
    for (const auto& [w, ch] : parts) {
      detail::require(ch.system_ == parts.front().second.system_, "CpMapChannel::mixture: system mismatch");
      for (auto b : ch.branches_) {
        b.probability *= w;
        branches.push_back(std::move(b));
      }
    }
    return CpMapChannel(parts.front().second.system_, std::move(branches));
  }

  const SiteSystem& system() const { return system_; }
  const std::vector<ChannelBranch>& branches() const { return branches_; }
  Eigen::Index dim() const { return static_cast<Eigen::Index>(system_.total_dim()); }

  /// Linear action on an arbitrary operator.
  Matrix apply(const Matrix& x) const {
    detail::require(x.rows() == dim() && x.cols() == dim(), "CpMapChannel: operator dimension mismatch");
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (std::size_t b = 0; b < branches_.size(); ++b)
      if (branches_[b].probability != 0.0) add_branch(out, branches_[b].probability, b, x);
    return out;
  }

  /// Action of a single branch, without its probability weight.
  Matrix apply_branch(std::size_t b, const Matrix& x) const {
    detail::require(x.rows() == dim() && x.cols() == dim(), "CpMapChannel: operator dimension mismatch");
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    add_branch(out, 1.0, b, x);
    return out;
  }

  /// Re-symmetrized output state.
  DensityMatrix apply(const DensityMatrix& rho) const {
    detail::require(rho.system() == system_, "CpMapChannel: state does not match channel system");
    return DensityMatrix(Operator(apply(rho.matrix()), system_), DensityMatrix::Trusted{});
  }

  /// Weighted full-dimension Kraus operators (weights already folded in).
  std::vector<Matrix> kraus_expansion() const {
    std::vector<Matrix> out;
    for (const auto& b : branches_) {
      const double w = std::sqrt(b.probability);
      for (const auto& k : b.kraus) out.push_back(w * tensor_embed_matrix(k.matrix(), k.support()));
      for (const auto& r : b.replacements) {
        Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (r.state + r.state.adjoint()));
        const Eigen::Index n = r.filter.rows();
        for (Eigen::Index a = 0; a < n; ++a) {
          const double s = es.eigenvalues()(a);
          if (s <= 0.0) continue;
          for (Eigen::Index c = 0; c < n; ++c) {
            const Matrix local = std::sqrt(s) * es.eigenvectors().col(a) * r.filter.row(c);
            out.push_back(w * tensor_embed_matrix(local, r.support));
          }
        }
      }
    }
    return out;
  }

  /// Matrix of the channel on column-stacked vectorizations.
  Superoperator superoperator() const {
    const Eigen::Index d = dim();
    Matrix s = Matrix::Zero(d * d, d * d);
    for (const auto& k : kraus_expansion()) detail::add_kron(s, 1.0, k.conjugate(), k);
    return Superoperator(std::move(s), system_);
  }

  /// max |T^*(1) - 1|.
  double trace_defect() const {
    const Eigen::Index d = dim();
    Matrix sum = Matrix::Zero(d, d);
    for (std::size_t b = 0; b < branches_.size(); ++b) {
      const auto& cb = compiled_[b];
      const double p = branches_[b].probability;
      for (const auto& [layout, k] : cb.kraus) {
        const auto rest = static_cast<Eigen::Index>(layout->rest_dim());
        sum += p * layout->place(k.adjoint() * k, Matrix::Identity(rest, rest));
      }
      for (const auto& r : cb.replacements) {
        const auto rest = static_cast<Eigen::Index>(r.layout->rest_dim());
        sum += p * r.state.trace() * r.layout->place(r.gram, Matrix::Identity(rest, rest));
      }
    }
    return detail::max_abs(sum - Matrix::Identity(d, d));
  }

 private:
  void add_branch(Matrix& out, double w, std::size_t b, const Matrix& x) const {
    const auto& cb = compiled_[b];
    for (const auto& [layout, k] : cb.kraus) layout->add_sandwich(out, w, k, x);
    for (const auto& r : cb.replacements) {
      const Matrix reduced = r.layout->trace_out(r.gram, x);
      r.layout->add_placed(out, w, r.state, reduced);
    }
  }

  struct CompiledReplacement {
    std::shared_ptr<const LocalLayout> layout;
    Matrix gram;  // filter^† filter
    Matrix state;
  };
  struct CompiledBranch {
    std::vector<std::pair<std::shared_ptr<const LocalLayout>, Matrix>> kraus;
    std::vector<CompiledReplacement> replacements;
  };

  Matrix tensor_embed_matrix(const Matrix& local, const std::vector<int>& support) const {
    const LocalLayout layout(system_, support);
    const auto rest = static_cast<Eigen::Index>(layout.rest_dim());
    return layout.place(local, Matrix::Identity(rest, rest));
  }

  void compile() {
    std::map<std::vector<int>, std::shared_ptr<const LocalLayout>> cache;
    auto layout_for = [&](const std::vector<int>& support) {
      auto it = cache.find(support);
      if (it != cache.end()) return it->second;
      auto l = std::make_shared<const LocalLayout>(system_, support);
      cache.emplace(support, l);
      return l;
    };
    compiled_.clear();
    for (const auto& b : branches_) {
      CompiledBranch cb;
      for (const auto& k : b.kraus) {
        k.check_against(system_);
        cb.kraus.emplace_back(layout_for(k.support()), k.matrix());
      }
      for (const auto& r : b.replacements) {
        auto layout = layout_for(r.support);
        const auto n = static_cast<Eigen::Index>(layout->local_dim());
        detail::require(r.filter.rows() == n && r.filter.cols() == n && r.state.rows() == n && r.state.cols() == n,
                        "ReplacementTerm: local dimension mismatch");
        cb.replacements.push_back({layout, r.filter.adjoint() * r.filter, r.state});
      }
      compiled_.push_back(std::move(cb));
    }
  }

  SiteSystem system_;
  std::vector<ChannelBranch> branches_;
  std::vector<CompiledBranch> compiled_;
};

inline DensityMatrix apply_channel(const CpMapChannel& ch, const DensityMatrix& rho) { return ch.apply(rho); }

/// Heisenberg-picture map T^* as a superoperator.
inline Superoperator channel_adjoint(const CpMapChannel& ch) { return ch.superoperator().adjoint(); }

/// n_scale (T - id): same fixed points as the channel, spectrum shifted and scaled.
inline Superoperator channel_to_generator(const CpMapChannel& ch, int n_scale) {
  detail::require(n_scale >= 1, "channel_to_generator: n_scale must be >= 1");
  const Superoperator s = ch.superoperator();
  const Eigen::Index n = s.matrix().rows();
  return Superoperator(static_cast<double>(n_scale) * (s.matrix() - Matrix::Identity(n, n)), ch.system());
}

}  // namespace dissipative
