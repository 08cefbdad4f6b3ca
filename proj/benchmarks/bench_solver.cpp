#include "ppens/mms.hpp"

#include <benchmark/benchmark.h>

using namespace ppens;

namespace {

void BM_Geometry(benchmark::State& state) {
  auto mc = irregular_case();
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(make_geometry(mc.domain, n));
}
BENCHMARK(BM_Geometry)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_SolverSetup(benchmark::State& state) {
  auto mc = irregular_case();
  Geometry geo = make_geometry(mc.domain, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    Solver s(geo, mc.problem(), SolverConfig{});
    benchmark::DoNotOptimize(s.dt());
  }
}
BENCHMARK(BM_SolverSetup)->Arg(40)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_Step(benchmark::State& state, ManufacturedCase mc) {
  Geometry geo = make_geometry(mc.domain, static_cast<int>(state.range(0)));
  Solver s(geo, mc.problem(), SolverConfig{});
  FlowState st = s.initial_state(0.0);
  for (auto _ : state) benchmark::DoNotOptimize(s.step(st));
}
BENCHMARK_CAPTURE(BM_Step, square, square_case())->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);
BENCHMARK_CAPTURE(BM_Step, irregular, irregular_case())->Arg(40)->Arg(80)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
