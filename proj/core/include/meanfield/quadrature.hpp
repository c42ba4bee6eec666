#pragma once

#include <vector>

namespace mf {

/// Gauss-Hermite rule for the standard normal weight: E f(G) ≈ Σ w_i f(x_i),
/// with Σ w_i = 1.
struct GaussHermite {
  std::vector<double> nodes;
  std::vector<double> weights;
  std::vector<double> log_weights;
};

/// Cached n-point rule (Golub-Welsch with a Newton polish of the nodes).
const GaussHermite& gauss_hermite(int n);

double normal_pdf(double x) noexcept;
double normal_cdf(double x) noexcept;
/// log Φ(x), accurate far into the lower tail.
double log_normal_cdf(double x) noexcept;
/// Numerically stable log(exp(a) + exp(b)).
double log_add_exp(double a, double b) noexcept;

}  // namespace mf
