#pragma once

#include <string>
#include <vector>

#include "dissipative/core/ops.hpp"
#include "dissipative/liouville/spectrum.hpp"

namespace dissipative::dse {

inline constexpr double kProjectorTol = 1e-10;
inline constexpr double kGroundTol = 1e-9;

/// H = Σ_λ H_λ with every H_λ a projector on a few sites.
class FrustrationFreeHamiltonian {
 public:
  FrustrationFreeHamiltonian() = default;
  FrustrationFreeHamiltonian(SiteSystem system, std::vector<LocalOperator> terms)
      : system_(std::move(system)), terms_(std::move(terms)) {
    detail::require(!terms_.empty(), "Hamiltonian has no terms");
    for (std::size_t k = 0; k < terms_.size(); ++k) {
      terms_[k].check_against(system_);
      const Matrix& h = terms_[k].matrix();
      const double err = std::max(detail::max_abs(h * h - h), detail::max_abs(h - h.adjoint()));
      detail::require(err <= kProjectorTol, "term " + std::to_string(k) + " is not a projector (error " + std::to_string(err) + ")");
    }
  }

  const SiteSystem& system() const { return system_; }
  const std::vector<LocalOperator>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }

  Matrix term_matrix(std::size_t k) const { return tensor_embed(terms_.at(k), system_).matrix(); }

  Matrix matrix() const {
    const auto d = static_cast<Eigen::Index>(system_.total_dim());
    Matrix h = Matrix::Zero(d, d);
    for (const auto& t : terms_) {
      const LocalLayout layout(system_, t.support());
      const auto rest = static_cast<Eigen::Index>(layout.rest_dim());
      layout.add_placed(h, 1.0, t.matrix(), Matrix::Identity(rest, rest));
    }
    return h;
  }

  /// Projector onto the eigenspace of H with eigenvalue below min + tol.
  Matrix ground_projector(double tol = kGroundTol) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix());
    const double e0 = es.eigenvalues()(0);
    Eigen::Index k = 0;
    while (k < es.eigenvalues().size() && es.eigenvalues()(k) <= e0 + tol) ++k;
    const Matrix v = es.eigenvectors().leftCols(k);
    return v * v.adjoint();
  }

 private:
  SiteSystem system_;
  std::vector<LocalOperator> terms_;
};

struct ValidationReport {
  std::vector<double> projector_errors;
  double min_eigenvalue = 0.0;
  int ground_dim = 0;
  bool frustration_free = false;
  RealMatrix commutators;  // max |[H_λ, H_μ]|
  bool commuting = false;
};

inline ValidationReport validate(const FrustrationFreeHamiltonian& h) {
  ValidationReport r;
  for (const auto& t : h.terms()) {
    const Matrix& m = t.matrix();
    r.projector_errors.push_back(std::max(detail::max_abs(m * m - m), detail::max_abs(m - m.adjoint())));
  }
  const RealVector ev = hermitian_eigenvalues(h.matrix());
  r.min_eigenvalue = ev(0);
  for (Eigen::Index i = 0; i < ev.size(); ++i)
    if (ev(i) <= ev(0) + kGroundTol) ++r.ground_dim;
  r.frustration_free = std::abs(r.min_eigenvalue) <= kGroundTol;
  const auto n = static_cast<Eigen::Index>(h.size());
  r.commutators = RealMatrix::Zero(n, n);
  std::vector<Matrix> full;
  for (std::size_t k = 0; k < h.size(); ++k) full.push_back(h.term_matrix(k));
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const auto& x = full[static_cast<std::size_t>(a)];
      const auto& y = full[static_cast<std::size_t>(b)];
      r.commutators(a, b) = r.commutators(b, a) = detail::max_abs(x * y - y * x);
    }
  r.commuting = n < 2 || r.commutators.maxCoeff() <= 1e-12;
  return r;
}

/// tr[H rho].
inline double energy(const Matrix& h, const DensityMatrix& rho) {
  return (h.transpose().cwiseProduct(rho.matrix())).sum().real();
}

}  // namespace dissipative::dse
