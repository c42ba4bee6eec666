#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace mf {

/// Dense order-k tensor over ℝⁿ, stored in full (n^k entries, first index fastest)
/// and kept invariant under index permutations.
class SymmetricTensor {
 public:
  SymmetricTensor() = default;

  /// Symmetrizes raw coefficients: G^s = (1/k!) Σ_π G∘π.
  static SymmetricTensor symmetrize(int order, int n, const std::vector<double>& raw);
  /// Wraps coefficients that are already symmetric (checked).
  static SymmetricTensor from_symmetric(int order, int n, std::vector<double> data);

  /// Number of entries of an order-k tensor on ℝⁿ, or UINT64_MAX on overflow.
  static std::uint64_t entry_count(int order, int n);

  int order() const { return order_; }
  int n() const { return n_; }
  const std::vector<double>& data() const { return data_; }
  double at(const std::vector<int>& index) const;

  /// G{m}: contraction of m against k-1 indices, an n-vector.
  Eigen::VectorXd contract_all_but_one(const Eigen::VectorXd& m) const;
  /// ⟨G, m^{⊗k}⟩.
  double contract_all(const Eigen::VectorXd& m) const;

  SymmetricTensor scaled(double factor) const;

 private:
  int order_ = 0;
  int n_ = 0;
  std::vector<double> data_;
};

}  // namespace mf
