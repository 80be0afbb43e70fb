#include <numbers>

#include <benchmark/benchmark.h>

#include "homest/inference.hpp"
#include "homest/model.hpp"
#include "homest/trajectory.hpp"

using namespace homest;

namespace {

SystemModel qubit() {
  QubitConfig c;
  c.omega = 1.0;
  c.phase = std::numbers::pi / 2;
  return make_qubit_model(c);
}

// steps/second of one trajectory; range(0) selects the scheme
void BM_Simulate(benchmark::State& state) {
  const SystemModel m = qubit();
  SimulationOptions o;
  o.duration = 10.0;
  o.scheme = state.range(0) == 0 ? SmeScheme::kKraus : SmeScheme::kEulerMaruyama;
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_homodyne(m, 1.0, o, {1, stream++}));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 10000);
}
BENCHMARK(BM_Simulate)->Arg(0)->Arg(1)->ArgNames({"euler"});

void BM_FisherScore(benchmark::State& state) {
  const SystemModel m = qubit();
  FisherOptions f;
  f.duration = 10.0;
  f.n_traj = 1;
  f.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(fisher_scores(m, 1.0, f));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations()) * 10000);
}
BENCHMARK(BM_FisherScore);

}  // namespace
