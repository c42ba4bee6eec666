#include "meanfield/hamiltonian.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "meanfield/ensembles.hpp"
#include "meanfield/error.hpp"

namespace mf {

bool satisfies_flavor(const Eigen::VectorXd& sigma, Flavor flavor) {
  constexpr double tol = 1e-9;
  switch (flavor) {
    case Flavor::ising:
      return (sigma.array().abs() - 1.0).abs().maxCoeff() <= tol;
    case Flavor::spherical:
      return std::abs(sigma.squaredNorm() - static_cast<double>(sigma.size())) <= tol * sigma.size();
    case Flavor::relaxed:
      return sigma.size() == 0 || sigma.array().abs().maxCoeff() <= 1.0 + tol;
  }
  return false;
}

PSpinInstance::PSpinInstance(MixingPolynomial mixing, std::vector<SymmetricTensor> tensors)
    : mixing_(std::move(mixing)), tensors_(std::move(tensors)) {
  const auto degrees = mixing_.active_degrees();
  require(degrees.size() == tensors_.size(), ErrorKind::invalid_input,
          "one tensor per active mixing degree is required");
  n_ = tensors_.front().n();
  for (std::size_t i = 0; i < degrees.size(); ++i) {
    require(tensors_[i].order() == degrees[i], ErrorKind::invalid_input, "tensor order does not match mixing degree");
    require(tensors_[i].n() == n_, ErrorKind::invalid_dimension, "tensors disagree on n");
    const int k = degrees[i];
    scale_.push_back(std::sqrt(mixing_.coefficient(k)) / std::pow(static_cast<double>(n_), 0.5 * (k - 1)));
  }
}

PSpinInstance PSpinInstance::from_matrix(const SymmetricMatrix& a) {
  const int n = a.n();
  require(n >= 1, ErrorKind::invalid_dimension, "empty matrix");
  // With ξ₂ = 1/2 the scale is 1/√(2n); G^s = A √n / √2 recovers ⟨σ,Aσ⟩/2.
  const double factor = std::sqrt(static_cast<double>(n) / 2.0);
  std::vector<double> data(a.dense().data(), a.dense().data() + static_cast<std::size_t>(n) * n);
  for (double& v : data) v *= factor;
  return PSpinInstance(MixingPolynomial::sk(), {SymmetricTensor::from_symmetric(2, n, std::move(data))});
}

void PSpinInstance::check_input(const Eigen::VectorXd& v) const {
  require(v.size() == n_, ErrorKind::invalid_dimension,
          "configuration has length " + std::to_string(v.size()) + ", expected " + std::to_string(n_));
  require(v.allFinite(), ErrorKind::invalid_input, "configuration contains non-finite entries");
}

double PSpinInstance::energy(const Eigen::VectorXd& sigma) const {
  check_input(sigma);
  double h = 0.0;
  for (std::size_t i = 0; i < tensors_.size(); ++i) h += scale_[i] * tensors_[i].contract_all(sigma);
  return h;
}

Eigen::VectorXd PSpinInstance::gradient(const Eigen::VectorXd& m) const {
  Eigen::VectorXd g;
  energy_and_gradient(m, g);
  return g;
}

double PSpinInstance::energy_and_gradient(const Eigen::VectorXd& m, Eigen::VectorXd& grad) const {
  check_input(m);
  grad = Eigen::VectorXd::Zero(n_);
  double h = 0.0;
  for (std::size_t i = 0; i < tensors_.size(); ++i) {
    const Eigen::VectorXd c = tensors_[i].contract_all_but_one(m);
    const int k = tensors_[i].order();
    h += scale_[i] * c.dot(m);
    grad += (scale_[i] * k) * c;
  }
  return h;
}

bool PSpinInstance::quadratic_only() const { return tensors_.size() == 1 && tensors_.front().order() == 2; }

std::vector<CovarianceCell> covariance_probe(const MixingPolynomial& mixing, int n,
                                             const std::vector<std::pair<Eigen::VectorXd, Eigen::VectorXd>>& pairs,
                                             int num_instances, const Seed& seed) {
  require(n >= 1 && n <= 100, ErrorKind::invalid_input, "covariance probe needs 1 <= n <= 100");
  require(num_instances >= 1000, ErrorKind::invalid_input, "covariance probe needs >= 1000 instances");
  const std::size_t cells = pairs.size();
  std::vector<double> sum(cells, 0.0), sum_sq(cells, 0.0);
  for (int r = 0; r < num_instances; ++r) {
    const PSpinInstance inst = sample_pspin(mixing, n, seed.child(static_cast<std::uint64_t>(r)));
    for (std::size_t c = 0; c < cells; ++c) {
      const double prod = inst.energy(pairs[c].first) * inst.energy(pairs[c].second);
      sum[c] += prod;
      sum_sq[c] += prod * prod;
    }
  }
  std::vector<CovarianceCell> out(cells);
  for (std::size_t c = 0; c < cells; ++c) {
    const double mean = sum[c] / num_instances;
    const double var = std::max(0.0, sum_sq[c] / num_instances - mean * mean);
    CovarianceCell& cell = out[c];
    cell.overlap = pairs[c].first.dot(pairs[c].second) / n;
    cell.empirical = mean;
    cell.predicted = n * mixing.eval(cell.overlap);
    cell.stderr_ = std::sqrt(var * num_instances / (num_instances - 1.0) / num_instances);
    cell.within_3se = std::abs(cell.empirical - cell.predicted) <= 3.0 * cell.stderr_;
  }
  return out;
}

namespace {

constexpr int kBlocks = 64;

// Configuration code: bit (n-1-j) set means σ_j = +1, so smaller codes are
// lexicographically smaller configurations under -1 < +1.
Eigen::VectorXd decode(std::uint64_t code, int n) {
  Eigen::VectorXd s(n);
  for (int j = 0; j < n; ++j) s(j) = ((code >> (n - 1 - j)) & 1ULL) ? 1.0 : -1.0;
  return s;
}

// Calls visit(code, H) for every configuration whose Gray-code rank lies in
// block b of kBlocks. For quadratic instances, H is updated with O(n) flips.
template <class Visit>
void enumerate_block(const PSpinInstance& inst, int b, Visit&& visit) {
  const int n = inst.n();
  const std::uint64_t total = 1ULL << n;
  const std::uint64_t begin = total * static_cast<std::uint64_t>(b) / kBlocks;
  const std::uint64_t end = total * static_cast<std::uint64_t>(b + 1) / kBlocks;
  if (begin >= end) return;
  if (!inst.quadratic_only()) {
    for (std::uint64_t r = begin; r < end; ++r) {
      const std::uint64_t code = r ^ (r >> 1);
      visit(code, inst.energy(decode(code, n)));
    }
    return;
  }
  const auto& t = inst.tensors().front();
  Eigen::Map<const Eigen::MatrixXd> g(t.data().data(), n, n);
  const double c = std::sqrt(inst.mixing().coefficient(2)) / std::sqrt(static_cast<double>(n));
  std::uint64_t code = begin ^ (begin >> 1);
  Eigen::VectorXd s = decode(code, n);
  Eigen::VectorXd field = g * s;
  double quad = s.dot(field);
  visit(code, c * quad);
  for (std::uint64_t r = begin + 1; r < end; ++r) {
    const int bit = std::countr_zero(r);
    const int j = n - 1 - bit;
    const double sj = s(j);
    quad += -4.0 * sj * field(j) + 4.0 * g(j, j);
    field -= (2.0 * sj) * g.col(j);
    s(j) = -sj;
    code ^= (1ULL << bit);
    visit(code, c * quad);
  }
}

void check_enumerable(const PSpinInstance& inst) {
  require(inst.n() >= 1, ErrorKind::invalid_dimension, "empty instance");
  require(inst.n() <= kMaxEnumerationN, ErrorKind::resource_limit,
          "exhaustive enumeration needs n <= 22, got n = " + std::to_string(inst.n()));
}

struct BestSoFar {
  bool has = false;
  double value = 0.0;
  std::uint64_t code = 0;

  void offer(std::uint64_t c, double h) {
    if (!has) {
      has = true;
      value = h;
      code = c;
      return;
    }
    const double tol = 1e-10 * (1.0 + std::abs(value));
    if (h > value + tol) {
      value = h;
      code = c;
    } else if (h >= value - tol && c < code) {
      value = std::max(value, h);
      code = c;
    }
  }
};

}  // namespace

OptResult brute_force_opt(const PSpinInstance& instance) {
  check_enumerable(instance);
  std::vector<BestSoFar> best(kBlocks);
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < kBlocks; ++b) {
    BestSoFar local;
    enumerate_block(instance, b, [&](std::uint64_t code, double h) { local.offer(code, h); });
    best[b] = local;
  }
  BestSoFar total;
  for (const auto& b : best)
    if (b.has) total.offer(b.code, b.value);
  OptResult out;
  out.sigma = decode(total.code, instance.n());
  out.value = instance.energy(out.sigma) / instance.n();
  // The SK form ⟨σ,Aσ⟩/2n, i.e. the energy rescaled to ξ₂ = 1/2.
  out.sk_value = instance.quadratic_only()
                     ? out.value / std::sqrt(2.0 * instance.mixing().coefficient(2))
                     : std::numeric_limits<double>::quiet_NaN();
  return out;
}

double free_energy(const PSpinInstance& instance, double beta) {
  check_enumerable(instance);
  require(beta > 0.0 && std::isfinite(beta), ErrorKind::invalid_input, "beta must be positive and finite");
  std::vector<double> block_max(kBlocks, -std::numeric_limits<double>::infinity());
  std::vector<double> block_sum(kBlocks, 0.0);
#pragma omp parallel for schedule(dynamic, 1)
  for (int b = 0; b < kBlocks; ++b) {
    double m = -std::numeric_limits<double>::infinity();
    double s = 0.0;
    enumerate_block(instance, b, [&](std::uint64_t, double h) {
      const double x = beta * h;
      if (x <= m) {
        s += std::exp(x - m);
      } else {
        s = s * std::exp(m - x) + 1.0;
        m = x;
      }
    });
    block_max[b] = m;
    block_sum[b] = s;
  }
  double log_z = -std::numeric_limits<double>::infinity();
  for (int b = 0; b < kBlocks; ++b) {
    if (block_sum[b] == 0.0) continue;
    const double term = block_max[b] + std::log(block_sum[b]);
    log_z = std::max(log_z, term) + std::log1p(std::exp(-std::abs(log_z - term)));
  }
  return log_z / instance.n();
}

}  // namespace mf
