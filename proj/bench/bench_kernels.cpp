#include <benchmark/benchmark.h>
#include <omp.h>

#include <cmath>

#include "fmb/frame_sim.hpp"
#include "fmb/gp.hpp"
#include "fmb/monotonic_gp.hpp"
#include "fmb/noise.hpp"
#include "fmb/sampler.hpp"

using namespace fmb;

namespace {

CompiledCircuit noisy_circuit(int w, int d) {
  std::vector<Qubit> q;
  for (int i = 0; i < w; ++i) q.push_back(i);
  const auto noise = NoiseModel::uniform(q, 0.0003, 0.0075, {0.0043, 0.0043});
  FixedDensitySamplerConfig cfg;
  cfg.connectivity = ConnectivityGraph::all_to_all(w);
  Rng rng(3);
  return compile(sample_fixed_density_circuit(w, d, 0.25, cfg, rng), &noise);
}

void BM_RunShotsSerial(benchmark::State& state) {
  const auto c = noisy_circuit(20, 64);
  const auto shots = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_shots_serial(c, shots, 11));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RunShotsSerial)->Arg(4096)->Arg(65536)->Unit(benchmark::kMillisecond);

void BM_RunShotsParallel(benchmark::State& state) {
  const auto c = noisy_circuit(20, 64);
  const auto shots = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(run_shots(c, shots, 11));
  state.SetItemsProcessed(state.iterations() * state.range(0));
  state.counters["threads"] = omp_get_max_threads();
}
BENCHMARK(BM_RunShotsParallel)->Arg(4096)->Arg(65536)->Unit(benchmark::kMillisecond);

void BM_KernelMatrix(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(n, 3);
  KernelParams p;
  p.eta = 1.0;
  p.rho = Eigen::VectorXd::Constant(3, 0.7);
  p.sigma = 0.01;
  for (auto _ : state) benchmark::DoNotOptimize(kernel_matrix(x, x, p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_KernelMatrix)->RangeMultiplier(2)->Range(32, 512)->Complexity(benchmark::oNSquared);

// EP on N data points with M = N / 2 virtual points; cost is dominated by
// the (N + M)-sized factorizations.
void BM_EpFit(benchmark::State& state) {
  const auto n = static_cast<Eigen::Index>(state.range(0));
  Eigen::MatrixXd x(n, 1);
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    x(i, 0) = -2 + 4.0 * static_cast<double>(i) / static_cast<double>(n - 1);
    y[i] = -0.4 * std::tanh(x(i, 0)) + 0.1 * std::sin(7 * x(i, 0));
  }
  KernelParams p;
  p.eta = 0.5;
  p.rho = Eigen::VectorXd::Constant(1, 0.6);
  p.sigma = 0.05;
  const auto virt = place_virtual_points(Eigen::VectorXd::Constant(1, -2), Eigen::VectorXd::Constant(1, 2),
                                         static_cast<int>(n / 2), {-1});
  for (auto _ : state) benchmark::DoNotOptimize(MonotonicGPModel::fit(x, y, p, virt));
  state.SetComplexityN(n + n / 2);
}
BENCHMARK(BM_EpFit)->RangeMultiplier(2)->Range(16, 256)->Complexity(benchmark::oNCubed)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
