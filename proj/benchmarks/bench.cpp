#include <benchmark/benchmark.h>

#include "meanfield/ensembles.hpp"
#include "meanfield/hamiltonian.hpp"
#include "meanfield/parisi.hpp"
#include "meanfield/sparse_mp.hpp"

using namespace mf;

namespace {

Eigen::VectorXd normals(int n, const Seed& seed) {
  const CounterRng rng(seed);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = rng.normal(static_cast<std::uint64_t>(i));
  return v;
}

void BM_GoeMatvec(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SymmetricMatrix a = sample_goe(n, Seed{1, "bench"});
  const Eigen::VectorXd x = normals(n, Seed{2, "bench"});
  for (auto _ : state) benchmark::DoNotOptimize((a * x).eval());
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n) * n);
}
BENCHMARK(BM_GoeMatvec)->Arg(1000)->Arg(4000);

void BM_PowerIteration(benchmark::State& state) {
  const SymmetricMatrix a = sample_goe(static_cast<int>(state.range(0)), Seed{3, "bench"});
  for (auto _ : state) benchmark::DoNotOptimize(top_eigenvector(a, 100, 0.0).eigenvalue);
}
BENCHMARK(BM_PowerIteration)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_ParisiSolve(benchmark::State& state) {
  RSBProfile p;
  p.breakpoints = {0, 0.576, 0.923, 1};
  p.values = {0.373, 1.23, 4.02};
  ParisiGrid g;
  g.space_points = static_cast<int>(state.range(0));
  const MixingPolynomial sk = MixingPolynomial::sk();
  for (auto _ : state) benchmark::DoNotOptimize(functional(p, sk, Boundary::ising, g).value);
}
BENCHMARK(BM_ParisiSolve)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);

void BM_BpSweep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Graph g = sample_tree(n, 0, Seed{4, "bench"});
  const GraphicalModel m = GraphicalModel::from_graph(g, 3, sample_potentials(g, 3, Seed{5, "bench"}));
  MessageSet msgs = MessageSet::uniform(m);
  for (auto _ : state) {
    msgs = bp_step(m, msgs);
    benchmark::DoNotOptimize(msgs.nu.data());
  }
  state.SetItemsProcessed(state.iterations() * 2 * (n - 1));
}
BENCHMARK(BM_BpSweep)->Arg(1000)->Arg(10000);

void BM_TensorGradient(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const PSpinInstance inst = sample_pspin(MixingPolynomial::parse("0.5:2,0.5:3"), n, Seed{6, "bench"});
  const Eigen::VectorXd m = normals(n, Seed{7, "bench"});
  for (auto _ : state) benchmark::DoNotOptimize(inst.gradient(m).eval());
}
BENCHMARK(BM_TensorGradient)->Arg(100)->Arg(300);

}  // namespace

BENCHMARK_MAIN();
