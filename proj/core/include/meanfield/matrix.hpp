#pragma once

#include <Eigen/Dense>

namespace mf {

/// Dense real symmetric matrix. Both triangles are stored so that products
/// can use contiguous column access; symmetry is enforced at construction.
class SymmetricMatrix {
 public:
  SymmetricMatrix() = default;
  explicit SymmetricMatrix(Eigen::MatrixXd data);

  static SymmetricMatrix zeros(int n);

  int n() const { return static_cast<int>(data_.rows()); }
  double operator()(int i, int j) const { return data_(i, j); }
  const Eigen::MatrixXd& dense() const { return data_; }

  /// Sets A_ij and A_ji.
  void set(int i, int j, double value);

  Eigen::VectorXd operator*(const Eigen::VectorXd& v) const;
  /// ⟨v, A v⟩.
  double quadratic_form(const Eigen::VectorXd& v) const;

 private:
  Eigen::MatrixXd data_;
};

}  // namespace mf

namespace mf {

struct PowerIterationResult {
  Eigen::VectorXd vector;  // unit norm
  double eigenvalue = 0.0;  // Rayleigh quotient ⟨v, A v⟩
  double residual = 0.0;    // ‖A v − λ v‖
  int iterations = 0;
  bool converged = false;
};

/// Top (largest algebraic) eigenvector by power iteration on A + ρI, where ρ
/// is a power-iteration estimate of max |λ|. Deterministic start vector.
PowerIterationResult top_eigenvector(const SymmetricMatrix& a, int max_steps = 300, double tol = 1e-8);

}  // namespace mf
