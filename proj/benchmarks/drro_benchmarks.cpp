#include <cmath>
#include <filesystem>

#include <benchmark/benchmark.h>

#include "drro/lp.hpp"
#include "drro/model_io.hpp"
#include "drro/ratapprox.hpp"
#include "drro/solver.hpp"
#include "drro/spectral.hpp"

namespace {

using namespace drro;

StateSpaceModel Ac15() { return LoadModel(std::filesystem::path(DRRO_MODELS_DIR) / "ac15.txt"); }

void BM_SpectralFactorDft(benchmark::State& state) {
  const FrequencyGrid grid(static_cast<int>(state.range(0)));
  Vector m(grid.size());
  for (int n = 0; n < grid.size(); ++n) m(n) = 2.0 + std::cos(grid.angle(n)) + 0.3 * std::cos(3 * grid.angle(n));
  const SpectrumSamples spectrum(grid, m);
  for (auto _ : state) benchmark::DoNotOptimize(SpectralFactorDft(spectrum));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_SpectralFactorDft)->RangeMultiplier(4)->Range(1 << 10, 1 << 16)->Complexity();

void BM_FrankWolfeStep(benchmark::State& state) {
  const RiccatiData ricc = SolveDare(Ac15());
  const FrankWolfeSolver solver(ricc, FrequencyGrid(static_cast<int>(state.range(0))), 1.0);
  SolverState s = solver.Initial();
  for (int k = 0; k < 10; ++k) s = solver.Step(s);
  for (auto _ : state) benchmark::DoNotOptimize(solver.Step(s));
}
BENCHMARK(BM_FrankWolfeStep)->Arg(1024)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_Synthesize(benchmark::State& state) {
  const StateSpaceModel model = Ac15();
  const RiccatiData ricc = SolveDare(model);
  SolverConfig config;
  config.record_trace = false;
  for (auto _ : state) benchmark::DoNotOptimize(Synthesize(model, ricc, 1.0, config));
}
BENCHMARK(BM_Synthesize)->Unit(benchmark::kMillisecond);

void BM_RationalFeasibility(benchmark::State& state) {
  const FrequencyGrid grid(static_cast<int>(state.range(0)));
  Vector m(grid.size());
  for (int n = 0; n < grid.size(); ++n) m(n) = std::exp(std::cos(grid.angle(n)));
  const SpectrumSamples N(grid, m);
  for (auto _ : state) benchmark::DoNotOptimize(FeasibilityCheck(N, 3, 1e-3, 1e-6));
}
BENCHMARK(BM_RationalFeasibility)->Arg(1024)->Arg(4096)->Arg(16384)->Unit(benchmark::kMillisecond);

void BM_SolveMinMax(benchmark::State& state) {
  const int rows = static_cast<int>(state.range(0));
  Matrix A(rows + 16, 8);
  Vector b(rows + 16);
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < 8; ++j) A(i, j) = std::cos(0.37 * (i + 1) * (j + 1));
    b(i) = 1.0 + 0.1 * std::sin(0.11 * i);
  }
  // Box rows keep the problem bounded.
  A.bottomRows(16) << Matrix::Identity(8, 8), -Matrix::Identity(8, 8);
  b.tail(16).setConstant(100.0);
  for (auto _ : state) benchmark::DoNotOptimize(SolveMinMax(A, b));
}
BENCHMARK(BM_SolveMinMax)->Arg(256)->Arg(2048)->Arg(8192)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
