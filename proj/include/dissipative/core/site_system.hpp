#pragma once

#include <algorithm>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dissipative/core/types.hpp"

namespace dissipative {

/// Ordered list of local dimensions. Basis states are labelled by the
/// mixed-radix integer whose most significant digit is site 0, which is the
/// ordering produced by Kronecker products A_0 ⊗ A_1 ⊗ ...
class SiteSystem {
 public:
  SiteSystem() = default;

  explicit SiteSystem(std::vector<int> dims) : dims_(std::move(dims)) {
    detail::require(!dims_.empty(), "SiteSystem: at least one site required");
    total_ = 1;
    for (int d : dims_) {
      detail::require(d >= 2, "SiteSystem: local dimension must be >= 2, got " + std::to_string(d));
      total_ *= static_cast<std::size_t>(d);
    }
    strides_.assign(dims_.size(), 1);
    for (std::size_t s = dims_.size(); s-- > 1;) strides_[s - 1] = strides_[s] * static_cast<std::size_t>(dims_[s]);
  }

  static SiteSystem qubits(int n) { return SiteSystem(std::vector<int>(static_cast<std::size_t>(n), 2)); }
  static SiteSystem uniform(int n, int d) { return SiteSystem(std::vector<int>(static_cast<std::size_t>(n), d)); }

  std::size_t size() const { return dims_.size(); }
  int dim(std::size_t site) const { return dims_.at(site); }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t total_dim() const { return total_; }
  std::size_t stride(std::size_t site) const { return strides_.at(site); }

  int digit(std::size_t index, std::size_t site) const {
    return static_cast<int>((index / strides_[site]) % static_cast<std::size_t>(dims_[site]));
  }

  std::vector<int> digits(std::size_t index) const {
    std::vector<int> out(dims_.size());
    for (std::size_t s = 0; s < dims_.size(); ++s) out[s] = digit(index, s);
    return out;
  }

  std::size_t index(std::span<const int> digits) const {
    detail::require(digits.size() == dims_.size(), "SiteSystem::index: digit count mismatch");
    std::size_t idx = 0;
    for (std::size_t s = 0; s < dims_.size(); ++s) idx += static_cast<std::size_t>(digits[s]) * strides_[s];
    return idx;
  }

  /// Throws unless `sites` are distinct and in range.
  void check_support(std::span<const int> sites) const {
    detail::require(!sites.empty(), "support must not be empty");
    std::vector<int> seen(sites.begin(), sites.end());
    std::sort(seen.begin(), seen.end());
    detail::require(std::adjacent_find(seen.begin(), seen.end()) == seen.end(), "duplicate site index in support");
    detail::require(seen.front() >= 0 && static_cast<std::size_t>(seen.back()) < dims_.size(),
                    "site index out of range");
  }

  /// Dimensions of the listed sites in the listed order.
  SiteSystem subsystem(std::span<const int> sites) const {
    check_support(sites);
    std::vector<int> d;
    d.reserve(sites.size());
    for (int s : sites) d.push_back(dims_[static_cast<std::size_t>(s)]);
    return SiteSystem(std::move(d));
  }

  /// Sites not in `sites`, ascending.
  std::vector<int> complement(std::span<const int> sites) const {
    std::vector<int> out;
    for (int s = 0; s < static_cast<int>(dims_.size()); ++s)
      if (std::find(sites.begin(), sites.end(), s) == sites.end()) out.push_back(s);
    return out;
  }

  /// Tensor product `this ⊗ other`.
  SiteSystem tensor(const SiteSystem& other) const {
    std::vector<int> d = dims_;
    d.insert(d.end(), other.dims_.begin(), other.dims_.end());
    return SiteSystem(std::move(d));
  }

  friend bool operator==(const SiteSystem& a, const SiteSystem& b) { return a.dims_ == b.dims_; }

 private:
  std::vector<int> dims_;
  std::vector<std::size_t> strides_;
  std::size_t total_ = 0;
};

}  // namespace dissipative
