#pragma once

#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "meanfield/ensembles.hpp"
#include "meanfield/prior.hpp"

namespace mf {

/// Scalar channel Y = μΘ + τG tracked by state evolution; γ = (μ/τ)².
struct ScalarChannelState {
  double mu = 0.0;
  double tau = 0.0;
  double gamma = 0.0;
};

/// h(y) = E{Θ | μΘ + τG = y}.
class BayesDenoiser {
 public:
  BayesDenoiser(PriorSpec prior, double mu, double tau);

  double operator()(double y) const;
  double derivative(double y) const;
  double mu() const { return mu_; }
  double tau() const { return tau_; }

 private:
  // Posterior over the atoms: returns (mean, variance).
  std::pair<double, double> posterior(double y) const;

  PriorSpec prior_;
  std::vector<std::pair<double, double>> atoms_;
  std::vector<double> log_p_;
  double mu_;
  double tau_;
};

BayesDenoiser bayes_denoiser(const PriorSpec& prior, double mu, double tau);

/// F(γ) = E{E{Θ | √γΘ + G}²}.
double F_of_gamma(const PriorSpec& prior, double gamma);
/// I(γ): mutual information between Θ and √γΘ + G.
double mutual_information(const PriorSpec& prior, double gamma);
inline double mmse(const PriorSpec& prior, double gamma) { return 1.0 - F_of_gamma(prior, gamma); }

struct ScalarRecursion {
  std::vector<ScalarChannelState> states;  // k = 0 … K
  int fixed_point_step = -1;  // first k with |γ_{k+1} − γ_k| < 1e-10, or -1
};

/// γ_{k+1} = λ² F(γ_k) with μ_k = γ_k/λ and τ_k² = γ_k/λ².
ScalarRecursion se_scalar_recursion(const PriorSpec& prior, double lambda, int steps, double gamma_init);

struct Threshold {
  double gamma = 0.0;
  double rho = 0.0;  // √(γ/(1+γ))
  bool indeterminate = false;
};

inline double overlap_from_gamma(double gamma) { return std::sqrt(gamma / (1.0 + gamma)); }

/// γ_alg = inf{γ > 0 : λ²F(γ) < γ}.
Threshold gamma_alg(const PriorSpec& prior, double lambda);

/// Ψ(γ; b) = γ²/(4λ²) − γ/2 − bγ/2 + I(γ).
double psi(const PriorSpec& prior, double lambda, double gamma, double b = 0.0);

/// Fixed points of γ ↦ λ²F(γ) on [0, max(10, 4λ²)], by grid scan and bisection.
std::vector<double> fixed_points(const PriorSpec& prior, double lambda);

/// argmin of Ψ(·; 0) over γ ≥ 0.
Threshold gamma_bayes(const PriorSpec& prior, double lambda);

/// Scalar state evolution for an arbitrary denoiser family f(k, y; μ_k, τ_k):
/// μ_{k+1} = λ E{Θ f}, τ_{k+1}² = E{f²}. Returns the predicted overlaps μ/√(μ²+τ²) for k = 1 … K.
using DenoiserFamily = std::function<double(int k, double y, double mu, double tau)>;
std::vector<double> se_general_overlaps(const PriorSpec& prior, double lambda, int steps, double mu0, double tau0,
                                        const DenoiserFamily& f);

struct BayesAmpOptions {
  double gamma_floor = 1e-6;   // lower bound on the spectral γ_0 estimate
  int power_steps = 200;
};

struct BayesAmpResult {
  Eigen::VectorXd theta_hat;                  // h_K(θ^K)
  std::vector<double> overlaps;               // ρ_{k,n} of θ^k, k = 0 … K
  std::vector<ScalarChannelState> predicted;  // tracked (μ_k, τ_k, γ_k)
  bool spectral_init = false;
  double top_eigenvalue = 0.0;
  double lambda_hat = 0.0;
};

/// Bayes-optimal AMP on Y. Non-centered priors start from E{Θ}𝟙; centered
/// priors start from √n times the top eigenvector of Y.
BayesAmpResult run_bayes_amp(const SpikedInstance& instance, int steps, const BayesAmpOptions& options = {});

/// |⟨a, b⟩| / (‖a‖ ‖b‖), 0 when either vector vanishes.
double overlap(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace mf
