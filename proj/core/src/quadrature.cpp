#include "meanfield/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include "meanfield/error.hpp"

namespace mf {

namespace {

// Orthonormal probabilists' Hermite polynomials p_0..p_{n} at x.
void hermite_orthonormal(int n, double x, double& pn, double& pnm1, double& sum_sq) {
  double prev = 0.0;
  double cur = 1.0;
  sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    sum_sq += cur * cur;
    const double next = (x * cur - std::sqrt(static_cast<double>(k)) * prev) /
                        std::sqrt(static_cast<double>(k + 1));
    prev = cur;
    cur = next;
  }
  pn = cur;
  pnm1 = prev;
}

GaussHermite build_rule(int n) {
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    jacobi(k, k - 1) = jacobi(k - 1, k) = std::sqrt(static_cast<double>(k));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi, Eigen::EigenvaluesOnly);

  GaussHermite rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  rule.log_weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = eig.eigenvalues()(i);
    double pn = 0, pnm1 = 0, sum_sq = 0;
    for (int it = 0; it < 3; ++it) {
      hermite_orthonormal(n, x, pn, pnm1, sum_sq);
      const double dpn = std::sqrt(static_cast<double>(n)) * pnm1;
      if (dpn == 0.0) break;
      x -= pn / dpn;
    }
    hermite_orthonormal(n, x, pn, pnm1, sum_sq);
    rule.nodes[i] = x;
    rule.weights[i] = 1.0 / sum_sq;
    rule.log_weights[i] = -std::log(sum_sq);
  }
  // Symmetrize to remove last-bit asymmetry from the eigensolver.
  for (int i = 0; i < n / 2; ++i) {
    const int j = n - 1 - i;
    const double x = 0.5 * (rule.nodes[j] - rule.nodes[i]);
    const double w = 0.5 * (rule.weights[i] + rule.weights[j]);
    rule.nodes[i] = -x;
    rule.nodes[j] = x;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  double total = 0.0;
  for (double w : rule.weights) total += w;
  for (int i = 0; i < n; ++i) {
    rule.weights[i] /= total;
    rule.log_weights[i] = std::log(rule.weights[i]);
  }
  return rule;
}

}  // namespace

const GaussHermite& gauss_hermite(int n) {
  require(n >= 1 && n <= 512, ErrorKind::invalid_input, "Gauss-Hermite order must be in [1, 512]");
  static std::mutex mutex;
  static std::map<int, GaussHermite> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, build_rule(n)).first;
  return it->second;
}

double normal_pdf(double x) noexcept {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double normal_cdf(double x) noexcept { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_normal_cdf(double x) noexcept {
  if (x > -30.0) return std::log(normal_cdf(x));
  // Asymptotic Mills-ratio expansion.
  const double x2 = x * x;
  const double series = 1.0 - 1.0 / x2 + 3.0 / (x2 * x2) - 15.0 / (x2 * x2 * x2);
  return -0.5 * x2 - std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double log_add_exp(double a, double b) noexcept {
  if (a < b) std::swap(a, b);
  if (b == -INFINITY) return a;
  return a + std::log1p(std::exp(b - a));
}

}  // namespace mf
