#pragma once

#include <cmath>
#include <vector>

#include <Eigen/SVD>

#include "dissipative/core/local_action.hpp"
#include "dissipative/core/operator.hpp"

namespace dissipative {

/// Acts as `local` on its support and as the identity elsewhere.
inline Operator tensor_embed(const LocalOperator& local, const SiteSystem& system) {
  local.check_against(system);
  const LocalLayout layout(system, local.support());
  const auto rest = static_cast<Eigen::Index>(layout.rest_dim());
  return Operator(layout.place(local.matrix(), Matrix::Identity(rest, rest)), system);
}

/// Partial trace of an arbitrary operator; the result lives on the kept sites
/// in ascending order.
inline Operator partial_trace(const Operator& op, const std::vector<int>& traced_sites) {
  const SiteSystem& sys = op.system();
  sys.check_support(traced_sites);
  detail::require(traced_sites.size() < sys.size(), "partial_trace: cannot trace out every site");
  const LocalLayout layout(sys, traced_sites);
  return Operator(layout.trace_out(op.matrix()), sys.subsystem(layout.rest()));
}

inline DensityMatrix partial_trace(const DensityMatrix& rho, const std::vector<int>& traced_sites) {
  return DensityMatrix(partial_trace(rho.op(), traced_sites), DensityMatrix::Trusted{});
}

/// tr[rho * proj]; proj is expected Hermitian so the result is real.
inline double overlap(const DensityMatrix& rho, const Operator& proj) {
  detail::require(rho.dim() == proj.dim(), "overlap: dimension mismatch");
  // tr(A B) = sum_ij A_ij B_ji
  const cplx v = (rho.matrix().transpose().cwiseProduct(proj.matrix())).sum();
  return v.real();
}

/// Half the trace norm of a - b.
inline double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  detail::require(a.dim() == b.dim(), "trace_distance: dimension mismatch");
  return 0.5 * hermitian_eigenvalues(a.matrix() - b.matrix()).cwiseAbs().sum();
}

/// <psi|rho|psi> for normalized psi.
inline double fidelity(const DensityMatrix& rho, const Vector& psi) {
  detail::require(rho.dim() == psi.size(), "fidelity: dimension mismatch");
  const Vector v = psi / psi.norm();
  return (v.adjoint() * rho.matrix() * v)(0, 0).real();
}

namespace detail {
inline Matrix psd_sqrt(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  RealVector w = es.eigenvalues();
  const double cut = 1e-14 * std::max(1.0, w.cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < w.size(); ++i) w(i) = w(i) > cut ? std::sqrt(w(i)) : 0.0;
  return es.eigenvectors() * w.asDiagonal() * es.eigenvectors().adjoint();
}
}  // namespace detail

/// Uhlmann fidelity (tr sqrt(sqrt(a) b sqrt(a)))^2.
inline double fidelity(const DensityMatrix& a, const DensityMatrix& b) {
  detail::require(a.dim() == b.dim(), "fidelity: dimension mismatch");
  const Matrix sa = detail::psd_sqrt(a.matrix());
  Eigen::JacobiSVD<Matrix> svd(sa * detail::psd_sqrt(b.matrix()));
  const double f = svd.singularValues().sum();
  return f * f;
}

/// Column-stacking vectorization.
inline Vector vec(const Matrix& m) { return Eigen::Map<const Vector>(m.data(), m.size()); }

inline Matrix unvec(const Vector& v, Eigen::Index dim) {
  detail::require(v.size() == dim * dim, "unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

}  // namespace dissipative
