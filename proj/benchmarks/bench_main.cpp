#include <benchmark/benchmark.h>

#include <vector>

#include "ddforge/filter_engine.hpp"
#include "ddforge/lindblad_swap.hpp"
#include "ddforge/optimizer.hpp"
#include "ddforge/pmme_solver.hpp"
#include "ddforge/trajectory_oracle.hpp"

using namespace ddforge;

namespace {

const OUNoiseParams kNoise = OUNoiseParams::from_lambda_khz(80.0, 0.5, 0.8);

void BM_ChiTimeDomain(benchmark::State& state) {
  const auto seq = cpmg(static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(chi_time_domain(kNoise, seq, CoherencePair::bell()));
}
BENCHMARK(BM_ChiTimeDomain)->Arg(8)->Arg(32)->Arg(128);

void BM_ChiFrequencyDomain(benchmark::State& state) {
  const auto seq = cpmg(static_cast<int>(state.range(0)), 1.0);
  for (auto _ : state) benchmark::DoNotOptimize(chi_frequency_domain(kNoise, seq, CoherencePair::bell()));
}
BENCHMARK(BM_ChiFrequencyDomain)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_SwapEvolution(benchmark::State& state) {
  std::vector<double> t;
  for (int k = 0; k <= 2000; ++k) t.push_back(0.1 * k);
  const SwapModel model;
  const auto rho0 = states::basis(basis_index(1, 0));
  for (auto _ : state) benchmark::DoNotOptimize(evolve_swap(model, rho0, t));
}
BENCHMARK(BM_SwapEvolution)->Unit(benchmark::kMillisecond);

void BM_PmmeVolterra(benchmark::State& state) {
  const auto L = DephasingLindbladian::make(0.12633, 0.8);
  for (auto _ : state)
    benchmark::DoNotOptimize(pmme_evolve_volterra(L, MemoryKernel{0.5}, states::psi_plus(), 0.01, 5.0));
}
BENCHMARK(BM_PmmeVolterra)->Unit(benchmark::kMillisecond);

void BM_EnsembleCpmg8(benchmark::State& state) {
  EnsembleOptions opt;
  opt.n_traj = static_cast<std::size_t>(state.range(0));
  opt.bootstrap = 50;
  const std::vector<double> t{2.0, 4.0, 8.0, 16.0};
  const PulseErrorModel err{10.0, 0.02, false, false};
  for (auto _ : state)
    benchmark::DoNotOptimize(run_with_errors(kNoise, cpmg(8, 16.0), err, states::psi_plus(), t, opt));
}
BENCHMARK(BM_EnsembleCpmg8)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_OptimizeN8(benchmark::State& state) {
  OptimizationProblem p;
  p.noise = kNoise;
  p.method = state.range(0) ? CostMethod::frequency_domain : CostMethod::time_domain;
  for (auto _ : state) benchmark::DoNotOptimize(optimize(p));
}
BENCHMARK(BM_OptimizeN8)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
