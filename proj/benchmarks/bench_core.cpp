#include <benchmark/benchmark.h>

#include <cmath>
#include <random>

#include "angio/integrator.hpp"
#include "angio/validation.hpp"

using namespace angio;

namespace {

Spectrum random_state(int n) {
  const SpectralGrid g(n);
  std::mt19937_64 rng(1);
  return random_band_limited(g, g.dealias_cutoff(), 1e-3, rng);
}

void BM_Forward(benchmark::State& st) {
  const RealField f = backward(random_state(static_cast<int>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(forward(f));
}
BENCHMARK(BM_Forward)->RangeMultiplier(4)->Range(256, 16384);

void BM_Backward(benchmark::State& st) {
  const Spectrum s = random_state(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(backward(s));
}
BENCHMARK(BM_Backward)->RangeMultiplier(4)->Range(256, 16384);

void BM_Quadratic(benchmark::State& st) {
  const Spectrum s = random_state(static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(quadratic(s, true));
}
BENCHMARK(BM_Quadratic)->RangeMultiplier(4)->Range(256, 16384);

void BM_Rhs(benchmark::State& st) {
  ModelParams p;
  p.model = static_cast<ModelKind>(st.range(1));
  p.alpha = 1.5;
  const SimState s = SimState::reduced(0.0, random_state(static_cast<int>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(evaluate_rhs(s, p));
}
BENCHMARK(BM_Rhs)
    ->ArgsProduct({{1024, 4096},
                   {static_cast<int>(ModelKind::general),
                    static_cast<int>(ModelKind::alpha0),
                    static_cast<int>(ModelKind::alpha2)}});

void BM_Step(benchmark::State& st) {
  ModelParams p;
  p.model = ModelKind::alpha1;
  const SimState s = SimState::reduced(0.0, random_state(static_cast<int>(st.range(0))));
  const RhsFunction rhs = make_rhs(p);
  const IntegratorConfig cfg;
  for (auto _ : st) benchmark::DoNotOptimize(rk45_step(s, 1e-4, rhs, cfg));
}
BENCHMARK(BM_Step)->Arg(1024)->Arg(4096);

}  // namespace

BENCHMARK_MAIN();
