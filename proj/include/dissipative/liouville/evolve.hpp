#pragma once

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

#include "dissipative/liouville/superoperator.hpp"

namespace dissipative {

/// exp(t * sop) for a fixed t, reusable across many states.
class Propagator {
 public:
  Propagator(const Superoperator& sop, double t) : system_(sop.system()) {
    detail::require(t >= 0.0, "evolve: time must be non-negative");
    const Matrix scaled = t * sop.matrix();
    m_ = scaled.exp();
    if (!m_.allFinite()) throw NumericalError("evolve: matrix exponential did not converge");
  }

  const Matrix& matrix() const { return m_; }

  Matrix apply(const Matrix& x) const { return unvec(m_ * vec(x), static_cast<Eigen::Index>(system_.total_dim())); }

  /// Re-symmetrized result; throws when trace drifts by more than 1e-8.
  DensityMatrix apply(const DensityMatrix& rho) const {
    const Matrix out = apply(rho.matrix());
    if (std::abs(out.trace() - 1.0) > 1e-8) throw NumericalError("evolve: trace not preserved (is this a generator?)");
    return DensityMatrix(Operator(out, system_), DensityMatrix::Trusted{});
  }

 private:
  SiteSystem system_;
  Matrix m_;
};

inline DensityMatrix evolve(const Superoperator& sop, const DensityMatrix& rho, double t) {
  detail::require(rho.system() == sop.system(), "evolve: state does not match generator");
  if (t == 0.0) return rho;
  return Propagator(sop, t).apply(rho);
}

}  // namespace dissipative
