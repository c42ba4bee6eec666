#pragma once

#include <string>
#include <vector>

namespace mf {

/// ξ(t) = Σ_k ξ_k t^k with ξ_k ≥ 0 for k ≥ 2.
class MixingPolynomial {
 public:
  MixingPolynomial() = default;
  /// coefficients[k] is ξ_k; entries for k < 2 must be zero.
  explicit MixingPolynomial(std::vector<double> coefficients);

  /// Parses "coeff:degree,coeff:degree", e.g. "0.5:2,1:4".
  static MixingPolynomial parse(const std::string& text);
  static MixingPolynomial sk() { return MixingPolynomial({0.0, 0.0, 0.5}); }

  std::string to_string() const;

  int max_degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  double coefficient(int k) const;
  std::vector<int> active_degrees() const;
  const std::vector<double>& coefficients() const { return coeffs_; }

  /// Evaluation with the domain check t ∈ [0, 1].
  double xi(double t) const;
  double xi_prime(double t) const;
  double xi_second(double t) const;
  double xi_third(double t) const;

  /// Evaluation without a domain check (used for overlaps that may leave [0,1] by rounding).
  double eval(double t, int derivative = 0) const;

 private:
  std::vector<double> coeffs_;
};

}  // namespace mf
