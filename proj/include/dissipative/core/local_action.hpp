#pragma once

#include <memory>
#include <vector>

#include "dissipative/core/operator.hpp"

namespace dissipative {

/// Index bookkeeping for operators supported on a subset of sites. A full
/// basis index factors as local_offset(l) + rest_offset(r), where l runs over
/// the support (in support order) and r over the remaining sites (ascending).
/// Application routines only touch nonzero entries of the local matrix.
class LocalLayout {
 public:
  LocalLayout(const SiteSystem& system, std::vector<int> support) : system_(system), support_(std::move(support)) {
    system_.check_support(support_);
    rest_ = system_.complement(support_);
    local_dim_ = 1;
    for (int s : support_) local_dim_ *= static_cast<std::size_t>(system_.dim(static_cast<std::size_t>(s)));
    rest_dim_ = system_.total_dim() / local_dim_;
    local_off_ = offsets(support_, local_dim_);
    rest_off_ = rest_.empty() ? std::vector<Eigen::Index>{0} : offsets(rest_, rest_dim_);
  }

  const SiteSystem& system() const { return system_; }
  const std::vector<int>& support() const { return support_; }
  const std::vector<int>& rest() const { return rest_; }
  std::size_t local_dim() const { return local_dim_; }
  std::size_t rest_dim() const { return rest_dim_; }
  Eigen::Index full(std::size_t l, std::size_t r) const { return local_off_[l] + rest_off_[r]; }

  /// K_full * X.
  Matrix left(const Matrix& k, const Matrix& x) const {
    check_local(k);
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    const auto nz = nonzeros(k);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      const cplx* xc = x.col(j).data();
      cplx* oc = out.col(j).data();
      for (const auto& e : nz) {
        const Eigen::Index lo = local_off_[e.row], li = local_off_[e.col];
        for (std::size_t r = 0; r < rest_dim_; ++r) oc[lo + rest_off_[r]] += mul(e.value, xc[li + rest_off_[r]]);
      }
    }
    return out;
  }

  /// X * K_full.
  Matrix right(const Matrix& x, const Matrix& k) const {
    check_local(k);
    Matrix out = Matrix::Zero(x.rows(), x.cols());
    for (const auto& e : nonzeros(k)) {
      // out(:, (col, r)) += K(row, col) * X(:, (row, r))
      for (std::size_t r = 0; r < rest_dim_; ++r)
        out.col(local_off_[e.col] + rest_off_[r]).noalias() += e.value * x.col(local_off_[e.row] + rest_off_[r]);
    }
    return out;
  }

  /// K_full * X * K_full^†.
  /// K_full * X * K_full^†.
  Matrix sandwich(const Matrix& k, const Matrix& x) const { return right(left(k, x), k.adjoint()); }

  /// out += w K_full X K_full^†.
  void add_sandwich(Matrix& out, cplx w, const Matrix& k, const Matrix& x) const {
    const Matrix y = left(k, x);
    for (const auto& e : nonzeros(k)) {
      // (Y K^†)(:, (row, r)) += conj(K(row, col)) Y(:, (col, r))
      const cplx v = w * std::conj(e.value);
      for (std::size_t r = 0; r < rest_dim_; ++r)
        out.col(local_off_[e.row] + rest_off_[r]).noalias() += v * y.col(local_off_[e.col] + rest_off_[r]);
    }
  }

  /// tr_support(G_full * X), an operator on the remaining sites.
  Matrix trace_out(const Matrix& g, const Matrix& x) const {
    check_local(g);
    Matrix out = Matrix::Zero(static_cast<Eigen::Index>(rest_dim_), static_cast<Eigen::Index>(rest_dim_));
    const auto nz = nonzeros(g);
    for (std::size_t rc = 0; rc < rest_dim_; ++rc)
      for (const auto& e : nz) {
        // sum_l G(l, l') X((l', r), (l, rc))
        const Eigen::Index col = local_off_[e.row] + rest_off_[rc];
        const Eigen::Index lo = local_off_[e.col];
        for (std::size_t r = 0; r < rest_dim_; ++r)
          out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(rc)) += mul(e.value, x(lo + rest_off_[r], col));
      }
    return out;
  }

  /// tr_support(X).
  Matrix trace_out(const Matrix& x) const {
    const auto n = static_cast<Eigen::Index>(local_dim_);
    return trace_out(Matrix::Identity(n, n), x);
  }

  /// sigma (on the support) ⊗ y (on the rest), arranged in full ordering.
  Matrix place(const Matrix& sigma, const Matrix& y) const {
    check_local(sigma);
    const auto n = static_cast<Eigen::Index>(system_.total_dim());
    Matrix out = Matrix::Zero(n, n);
    add_placed(out, 1.0, sigma, y);
    return out;
  }

  void add_placed(Matrix& out, cplx weight, const Matrix& sigma, const Matrix& y) const {
    for (const auto& e : nonzeros(sigma)) {
      const cplx w = weight * e.value;
      for (std::size_t rc = 0; rc < rest_dim_; ++rc) {
        const Eigen::Index col = local_off_[e.col] + rest_off_[rc];
        for (std::size_t r = 0; r < rest_dim_; ++r) {
          const cplx v = y(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(rc));
          if (v != cplx{}) out(local_off_[e.row] + rest_off_[r], col) += mul(w, v);
        }
      }
    }
  }

 private:
  // Plain complex product; std::complex's operator* takes a slow NaN-recovery path.
  static cplx mul(cplx a, cplx b) { return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()}; }

  struct Entry {
    std::size_t row, col;
    cplx value;
  };

  static std::vector<Entry> nonzeros(const Matrix& k) {
    std::vector<Entry> out;
    for (Eigen::Index j = 0; j < k.cols(); ++j)
      for (Eigen::Index i = 0; i < k.rows(); ++i)
        if (k(i, j) != cplx{}) out.push_back({static_cast<std::size_t>(i), static_cast<std::size_t>(j), k(i, j)});
    return out;
  }

  void check_local(const Matrix& k) const {
    detail::require(static_cast<std::size_t>(k.rows()) == local_dim_ && static_cast<std::size_t>(k.cols()) == local_dim_,
                    "local operator dimension does not match its support");
  }

  std::vector<Eigen::Index> offsets(const std::vector<int>& sites, std::size_t count) const {
    std::vector<Eigen::Index> off(count, 0);
    for (std::size_t l = 0; l < count; ++l) {
      std::size_t rem = l;
      Eigen::Index idx = 0;
      for (std::size_t i = sites.size(); i-- > 0;) {
        const auto s = static_cast<std::size_t>(sites[i]);
        const auto d = static_cast<std::size_t>(system_.dim(s));
        idx += static_cast<Eigen::Index>((rem % d) * system_.stride(s));
        rem /= d;
      }
      off[l] = idx;
    }
    return off;
  }

  SiteSystem system_;
  std::vector<int> support_;
  std::vector<int> rest_;
  std::size_t local_dim_ = 1, rest_dim_ = 1;
  std::vector<Eigen::Index> local_off_, rest_off_;
};

}  // namespace dissipative
