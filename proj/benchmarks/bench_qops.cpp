#include <numbers>

#include <benchmark/benchmark.h>

#include "homest/model.hpp"
#include "homest/qops.hpp"
#include "homest/regression.hpp"

using namespace homest;

namespace {

SystemModel qubit(double omega) {
  QubitConfig c;
  c.omega = omega;
  c.phase = std::numbers::pi / 2;
  return make_qubit_model(c);
}

void BM_Propagator(benchmark::State& state) {
  const Superoperator l = qubit(1.0).liouvillian(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(propagator(l, 0.37));
}
BENCHMARK(BM_Propagator);

void BM_SteadyState(benchmark::State& state) {
  const Superoperator l = qubit(1.0).liouvillian(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(steady_state(l));
}
BENCHMARK(BM_SteadyState);

void BM_QrtUniform(benchmark::State& state) {
  const SystemModel m = qubit(2.0);
  const auto count = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qrt_uniform(m, 2.0, 1e-3, count, true));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_QrtUniform)->Arg(1000)->Arg(40000);

}  // namespace
