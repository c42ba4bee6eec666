#include "meanfield/ensembles.hpp"

#include <cmath>
#include <string>

#include "meanfield/error.hpp"

namespace mf {

SymmetricMatrix sample_goe(int n, const Seed& seed) {
  require(n >= 1, ErrorKind::invalid_dimension, "GOE dimension must be >= 1");
  const CounterRng rng(seed);
  Eigen::MatrixXd a(n, n);
  const double off = 1.0 / std::sqrt(static_cast<double>(n));
  const double diag = std::sqrt(2.0 / n);
  const std::uint64_t un = static_cast<std::uint64_t>(n);
#pragma omp parallel for schedule(static)
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i <= j; ++i) {
      const double g = rng.normal(static_cast<std::uint64_t>(i) * un + static_cast<std::uint64_t>(j));
      a(i, j) = g * (i == j ? diag : off);
    }
  }
  for (int j = 0; j < n; ++j)
    for (int i = j + 1; i < n; ++i) a(i, j) = a(j, i);
  return SymmetricMatrix(std::move(a));
}

PSpinInstance sample_pspin(const MixingPolynomial& mixing, int n, const Seed& seed) {
  require(n >= 1, ErrorKind::invalid_dimension, "p-spin dimension must be >= 1");
  std::vector<SymmetricTensor> tensors;
  for (int k : mixing.active_degrees()) {
    const std::uint64_t count = SymmetricTensor::entry_count(k, n);
    require(count <= kMaxTensorEntries, ErrorKind::resource_limit,
            "dense order-" + std::to_string(k) + " tensor with n = " + std::to_string(n) +
                " exceeds the memory budget");
    const CounterRng rng(seed.child("k" + std::to_string(k)));
    std::vector<double> raw(count);
#pragma omp parallel for schedule(static)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(count); ++c)
      raw[static_cast<std::size_t>(c)] = rng.normal(static_cast<std::uint64_t>(c));
    tensors.push_back(SymmetricTensor::symmetrize(k, n, raw));
  }
  return PSpinInstance(mixing, std::move(tensors));
}

Eigen::VectorXd sample_prior(const PriorSpec& prior, int n, const Seed& seed) {
  require(n >= 0, ErrorKind::invalid_dimension, "negative dimension");
  prior.validate();
  const CounterRng rng(seed);
  Eigen::VectorXd out(n);
  if (prior.kind == PriorSpec::Kind::gaussian) {
    for (int i = 0; i < n; ++i) out(i) = rng.normal(static_cast<std::uint64_t>(i));
    return out;
  }
  const auto atoms = prior.atoms();
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform(static_cast<std::uint64_t>(i));
    double acc = 0.0;
    double value = atoms.back().first;
    for (const auto& [v, w] : atoms) {
      acc += w;
      if (u < acc) {
        value = v;
        break;
      }
    }
    out(i) = value;
  }
  return out;
}

SpikedInstance sample_spiked(int n, double lambda, const PriorSpec& prior, const Seed& seed) {
  require(lambda >= 0.0 && std::isfinite(lambda), ErrorKind::invalid_input, "lambda must be finite and >= 0");
  SpikedInstance out;
  out.lambda = lambda;
  out.prior = prior;
  out.theta = sample_prior(prior, n, seed.child("theta"));
  SymmetricMatrix noise = sample_goe(n, seed);
  if (lambda == 0.0) {
    out.y = std::move(noise);
    return out;
  }
  Eigen::MatrixXd y = noise.dense();
  const double c = lambda / n;
  // Explicit loop: a blocked outer product need not round (i,j) and (j,i) identically.
  for (int j = 0; j < n; ++j)
    for (int i = 0; i <= j; ++i) {
      y(i, j) += c * out.theta(i) * out.theta(j);
      if (i != j) y(j, i) = y(i, j);
    }
  out.y = SymmetricMatrix(std::move(y));
  return out;
}

Graph sample_tree(int n, int max_degree, const Seed& seed) {
  require(n >= 1, ErrorKind::invalid_dimension, "tree needs n >= 1");
  require(max_degree == 0 || max_degree >= 2 || n <= 2, ErrorKind::invalid_input,
          "max_degree must be 0 (unrestricted) or >= 2");
  Graph g;
  g.n = n;
  if (n == 1) return g;
  if (n == 2) {
    g.edges.emplace_back(0, 1);
    return g;
  }
  RngStream rng(seed);
  std::vector<int> code(n - 2);
  std::vector<int> degree(n);
  for (int attempt = 0;; ++attempt) {
    require(attempt < 100000, ErrorKind::invalid_input, "could not satisfy the degree bound");
    std::fill(degree.begin(), degree.end(), 1);
    for (int& c : code) {
      c = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      ++degree[c];
    }
    bool ok = true;
    if (max_degree > 0)
      for (int d : degree) ok = ok && d <= max_degree;
    if (ok) break;
  }
  // Linear-time Prüfer decoding.
  int ptr = 0;
  while (degree[ptr] != 1) ++ptr;
  int leaf = ptr;
  for (int v : code) {
    g.edges.emplace_back(std::min(leaf, v), std::max(leaf, v));
    if (--degree[v] == 1 && v < ptr) {
      leaf = v;
    } else {
      ++ptr;
      while (degree[ptr] != 1) ++ptr;
      leaf = ptr;
    }
  }
  g.edges.emplace_back(std::min(leaf, n - 1), std::max(leaf, n - 1));
  return g;
}

std::vector<Eigen::MatrixXd> sample_potentials(const Graph& graph, int alphabet_size, const Seed& seed,
                                               double scale) {
  require(alphabet_size >= 1, ErrorKind::invalid_input, "alphabet size must be >= 1");
  const CounterRng rng(seed);
  const std::uint64_t per_edge = static_cast<std::uint64_t>(alphabet_size) * alphabet_size;
  std::vector<Eigen::MatrixXd> out;
  out.reserve(graph.edges.size());
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    Eigen::MatrixXd psi(alphabet_size, alphabet_size);
    for (int a = 0; a < alphabet_size; ++a)
      for (int b = 0; b < alphabet_size; ++b)
        psi(a, b) = std::exp(scale * rng.normal(e * per_edge + static_cast<std::uint64_t>(a * alphabet_size + b)));
    out.push_back(std::move(psi));
  }
  return out;
}

}  // namespace mf
