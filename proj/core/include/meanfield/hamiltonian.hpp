#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "meanfield/matrix.hpp"
#include "meanfield/mixing.hpp"
#include "meanfield/rng.hpp"
#include "meanfield/tensor.hpp"

namespace mf {

enum class Flavor { ising, spherical, relaxed };

/// Checks that sigma satisfies the constraint of its flavor within 1e-9.
bool satisfies_flavor(const Eigen::VectorXd& sigma, Flavor flavor);

/// Mixed p-spin Hamiltonian H(σ) = Σ_k √ξ_k / n^{(k-1)/2} ⟨G^(k,s), σ^{⊗k}⟩.
class PSpinInstance {
 public:
  PSpinInstance() = default;
  /// tensors[i] must have order mixing.active_degrees()[i].
  PSpinInstance(MixingPolynomial mixing, std::vector<SymmetricTensor> tensors);

  /// The SK instance with H(σ) = ⟨σ, Aσ⟩/2 under ξ(t) = t²/2.
  static PSpinInstance from_matrix(const SymmetricMatrix& a);

  int n() const { return n_; }
  const MixingPolynomial& mixing() const { return mixing_; }
  const std::vector<SymmetricTensor>& tensors() const { return tensors_; }

  double energy(const Eigen::VectorXd& sigma) const;
  double normalized_energy(const Eigen::VectorXd& sigma) const { return energy(sigma) / n_; }
  Eigen::VectorXd gradient(const Eigen::VectorXd& m) const;
  /// Both at the cost of one gradient (Euler identity per degree).
  double energy_and_gradient(const Eigen::VectorXd& m, Eigen::VectorXd& grad) const;

  /// True if only k = 2 is active (enables the O(n) flip updates in enumeration).
  bool quadratic_only() const;

 private:
  void check_input(const Eigen::VectorXd& v) const;

  int n_ = 0;
  MixingPolynomial mixing_;
  std::vector<SymmetricTensor> tensors_;
  std::vector<double> scale_;  // √ξ_k / n^{(k-1)/2}
};

/// Maximum entries held in one dense tensor; larger requests are resource-limit errors.
inline constexpr std::uint64_t kMaxTensorEntries = 160'000'000ULL;

struct CovarianceCell {
  double overlap = 0.0;  // ⟨σ1,σ2⟩/n
  double empirical = 0.0;
  double predicted = 0.0;  // n ξ(overlap)
  double stderr_ = 0.0;
  bool within_3se = false;
};

/// Monte Carlo check of E H(σ1)H(σ2) = n ξ(⟨σ1,σ2⟩/n) over fresh instances.
std::vector<CovarianceCell> covariance_probe(const MixingPolynomial& mixing, int n,
                                             const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
                                             int num_instances, const Seed& seed);

struct OptResult {
  double value = 0.0;      // max H(σ)/n
  double sk_value = 0.0;   // ⟨σ,Aσ⟩/2n form for k = 2 (equals value for the SK normalization)
  Eigen::VectorXd sigma;   // argmax, lexicographically smallest among ties (-1 < +1)
};

inline constexpr int kMaxEnumerationN = 22;

/// Exhaustive maximization over {±1}ⁿ, n ≤ 22.
OptResult brute_force_opt(const PSpinInstance& instance);

/// φ_n(β) = (1/n) log Σ_σ exp(β H(σ)) by streaming log-sum-exp, n ≤ 22.
double free_energy(const PSpinInstance& instance, double beta);

}  // namespace mf
