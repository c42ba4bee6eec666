#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "meanfield/hamiltonian.hpp"
#include "meanfield/matrix.hpp"
#include "meanfield/mixing.hpp"
#include "meanfield/prior.hpp"
#include "meanfield/rng.hpp"

namespace mf {

/// GOE(n): A_ii ~ N(0, 2/n), A_ij ~ N(0, 1/n) for i < j, independent.
/// Entry (i, j), i ≤ j, uses counter i·n + j of the seed's stream.
SymmetricMatrix sample_goe(int n, const Seed& seed);

/// One i.i.d. standard Gaussian tensor per active degree, symmetrized.
PSpinInstance sample_pspin(const MixingPolynomial& mixing, int n, const Seed& seed);

/// n i.i.d. draws from the prior.
Eigen::VectorXd sample_prior(const PriorSpec& prior, int n, const Seed& seed);

struct SpikedInstance {
  SymmetricMatrix y;
  Eigen::VectorXd theta;
  double lambda = 0.0;
  PriorSpec prior;
};

/// Y = (λ/n) θθᵀ + A. The noise A uses the seed itself (so λ = 0 reproduces
/// sample_goe exactly); θ uses the child stream "theta".
SpikedInstance sample_spiked(int n, double lambda, const PriorSpec& prior, const Seed& seed);

struct Graph {
  int n = 0;
  std::vector<std::pair<int, int>> edges;
};

/// Uniformly random labeled tree via a Prüfer sequence. max_degree ≥ 2 restricts
/// the degree by rejection (0 means unrestricted).
Graph sample_tree(int n, int max_degree, const Seed& seed);

/// Strictly positive q×q tables exp(N(0, scale²)), one per edge.
std::vector<Eigen::MatrixXd> sample_potentials(const Graph& graph, int alphabet_size, const Seed& seed,
                                               double scale = 1.0);

}  // namespace mf
