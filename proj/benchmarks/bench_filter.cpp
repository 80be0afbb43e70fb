#include <numbers>

#include <benchmark/benchmark.h>

#include "homest/correlations.hpp"
#include "homest/inference.hpp"
#include "homest/model.hpp"
#include "homest/trajectory.hpp"

using namespace homest;

namespace {

SystemModel qubit() {
  QubitConfig c;
  c.omega = 2.0;
  c.phase = std::numbers::pi / 2;
  return make_qubit_model(c);
}

MeasurementRecord record() {
  SimulationOptions o;
  o.duration = 10.0;
  return simulate_homodyne(qubit(), 2.0, o, {3, 0}).record;
}

// candidate-steps/second of the lockstep filter bank
void BM_LoglikBank(benchmark::State& state) {
  const SystemModel m = qubit();
  const MeasurementRecord r = record();
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> thetas;
  for (std::size_t k = 0; k < n; ++k) thetas.push_back(0.5 + 3.5 * static_cast<double>(k) / static_cast<double>(n));
  const std::vector<std::size_t> at = {r.n_steps()};
  FilterOptions f;
  f.workers = 1;
  for (auto _ : state) benchmark::DoNotOptimize(loglik_bank(r, m, thetas, at, f));
  state.SetItemsProcessed(static_cast<int64_t>(state.iterations() * n * r.n_steps()));
}
BENCHMARK(BM_LoglikBank)->Arg(1)->Arg(64);

void BM_RecordCorrelation(benchmark::State& state) {
  const MeasurementRecord r = record();
  for (auto _ : state) benchmark::DoNotOptimize(record_correlation(r, {0.05, 40}, true));
}
BENCHMARK(BM_RecordCorrelation);

}  // namespace
