// Serial reference vs OpenMP paths for the hot kernels.

#include <benchmark/benchmark.h>

#include "cpf/oracle.hpp"
#include "cpf/spinbath.hpp"
#include "cpf/stochastic.hpp"

namespace {

cpf::Execution execution(const benchmark::State& state) {
  return state.range(0) == 0 ? cpf::Execution::serial : cpf::Execution::parallel;
}

void BM_SemianalyticCpf(benchmark::State& state) {
  cpf::McConfig cfg;
  cfg.n_trajectories = 200'000;
  cfg.execution = execution(state);
  const cpf::NoiseModel model = cpf::ExpCorrGauss{1.0, 1.0};
  for (auto _ : state) benchmark::DoNotOptimize(cpf::stochastic::mc_cpf_semianalytic(model, 1.0, 1.0, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_trajectories));
}
BENCHMARK(BM_SemianalyticCpf)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_SampledCpf(benchmark::State& state) {
  cpf::McConfig cfg;
  cfg.n_trajectories = 200'000;
  cfg.execution = execution(state);
  const cpf::NoiseModel model = cpf::StaticLorentz{1.0, 0.0};
  for (auto _ : state)
    benchmark::DoNotOptimize(cpf::stochastic::mc_cpf_sampling(model, 1.0, 1.0, cpf::Outcome::plus(), cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_trajectories));
}
BENCHMARK(BM_SampledCpf)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_LorentzEnsemble(benchmark::State& state) {
  cpf::McConfig cfg;
  cfg.n_trajectories = 20'000;
  cfg.execution = execution(state);
  cpf::LorentzCouplingSpec spec;
  spec.gamma = 1.0;
  spec.n_spins = 50;
  for (auto _ : state) benchmark::DoNotOptimize(cpf::spinbath::lorentz_ensemble(spec, 1.0, 1.0, cfg));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(cfg.n_trajectories));
}
BENCHMARK(BM_LorentzEnsemble)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_OracleProtocol(benchmark::State& state) {
  const auto spec = cpf::spinbath::scaled_gaussian_bath(static_cast<std::size_t>(state.range(1)), 1.0, 0.0);
  cpf::oracle::Options opts;
  opts.execution = execution(state);
  for (auto _ : state)
    benchmark::DoNotOptimize(cpf::oracle::protocol(spec, cpf::SystemInit{}, 0.7, 0.4, cpf::Outcome::plus(), opts));
}
BENCHMARK(BM_OracleProtocol)
    ->ArgNames({"parallel", "spins"})
    ->ArgsProduct({{0, 1}, {8, 12, 14}})
    ->Unit(benchmark::kMillisecond);

void BM_OracleEvolvePath(benchmark::State& state) {
  const auto spec = cpf::spinbath::scaled_gaussian_bath(14, 1.0, 0.0);
  cpf::oracle::Options opts;
  opts.execution = execution(state);
  opts.path = state.range(1) == 0 ? cpf::oracle::PropagatorPath::energy : cpf::oracle::PropagatorPath::per_spin;
  auto psi = cpf::oracle::initial_state(spec, cpf::SystemInit{});
  for (auto _ : state) {
    cpf::oracle::evolve(psi, spec, 0.01, opts);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_OracleEvolvePath)->ArgNames({"parallel", "per_spin"})->ArgsProduct({{0, 1}, {0, 1}});

}  // namespace

BENCHMARK_MAIN();
