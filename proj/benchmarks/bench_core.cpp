#include <benchmark/benchmark.h>

#include "topoclock/analytics.hpp"
#include "topoclock/evolve.hpp"
#include "topoclock/interferometer.hpp"
#include "topoclock/model.hpp"
#include "topoclock/noise.hpp"
#include "topoclock/spectroscopy.hpp"
#include "topoclock/units.hpp"

using namespace topoclock;

namespace {

const double kB = hz_to_angular(10.0);

void BM_BuildHamiltonian(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(build_rm_hamiltonian({kB / 3, kB, 0.01 * kB, 0.001 * kB, 0.0}, sites));
  }
}
BENCHMARK(BM_BuildHamiltonian)->Arg(64)->Arg(256);

void BM_KrylovStep(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const auto h = build_rm_hamiltonian({kB / 3, kB, 0.01 * kB, 0.001 * kB, 0.0}, sites);
  Eigen::VectorXcd psi = localized_state(sites, sites / 2, Level::ground).amplitudes();
  const double dt = Schedule::default_step(kB);
  for (auto _ : state) {
    step_exact(h, dt, psi);
    benchmark::ClobberMemory();
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_KrylovStep)->Arg(64)->Arg(128)->Arg(256);

void BM_BlockStep(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const auto h = build_rm_hamiltonian({0.0, kB, 0.0, 0.001 * kB, 0.0}, sites);
  Eigen::VectorXcd psi = localized_state(sites, sites / 2, Level::ground).amplitudes();
  for (auto _ : state) {
    block_step(h, 1e-3, psi);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_BlockStep)->Arg(128);

void BM_Propagator(benchmark::State& state) {
  const int sites = static_cast<int>(state.range(0));
  const auto h = build_rm_hamiltonian({kB / 3, kB, 0.0, 0.0, 0.0}, sites);
  for (auto _ : state) benchmark::DoNotOptimize(Propagator(h));
}
BENCHMARK(BM_Propagator)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_WindingNumber(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(winding_number_raw(1.0, 3.0, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_WindingNumber)->Arg(4096);

void BM_AnalyticDisplacement(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(analytic_mean_displacement(kB / 3, kB, 1.0));
}
BENCHMARK(BM_AnalyticDisplacement);

void BM_OneStepProtocol(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_one_step_protocol({kB / 3, kB, 0.01 * kB, 0.0, 0.0}, 64, kPi / kB));
  }
}
BENCHMARK(BM_OneStepProtocol)->Unit(benchmark::kMicrosecond);

void BM_SshClockEnsemble(benchmark::State& state) {
  const SSHClockSpec spec{hz_to_angular(5.0), kB};
  const NoiseSpec noise{0.01, 0.005, 0.001, false, 1};
  for (auto _ : state) {
    benchmark::DoNotOptimize(ensemble_run(
        [&](const NoiseRealization& r, std::size_t) { return std::vector<double>{run_ssh_clock(spec, 0.0, 0.0, r)}; },
        {"s"}, noise, 100, static_cast<unsigned>(state.range(0))));
  }
}
BENCHMARK(BM_SshClockEnsemble)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_ManyPulseRun(benchmark::State& state) {
  const auto spec = MPPSpec::p0();
  for (auto _ : state) benchmark::DoNotOptimize(run_mpp(spec, 0.01));
}
BENCHMARK(BM_ManyPulseRun)->Unit(benchmark::kMillisecond);

void BM_PumpCycle(benchmark::State& state) {
  const auto spec = TPPSpec::tau5();
  for (auto _ : state) benchmark::DoNotOptimize(pump_transport(spec, Level::excited, 1, 24));
}
BENCHMARK(BM_PumpCycle)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
