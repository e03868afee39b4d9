#include <benchmark/benchmark.h>

#include <random>

#include "ehaloha/analysis.hpp"
#include "ehaloha/optimizer.hpp"
#include "ehaloha/simulator.hpp"

using namespace ehaloha;

namespace {

Scenario experiment_scenario(double uqbar) {
    Scenario sc;
    sc.num_devices = 1000;
    sc.battery_capacity = 8;
    sc.gamma0 = sc.gamma1 = 0.005;
    sc.slot_channel_uses = 100;
    sc.rate_bits = 0.8;
    sc.noise_variance = 0.01;
    return with_uqbar(sc, uqbar, 1.0);
}

Strategy mid_strategy(int battery_capacity) {
    FreeParameterLayout layout(StrategyClass::Hybrid, battery_capacity);
    return layout.make_strategy(std::vector<double>(layout.count(), 0.5));
}

void BM_ReducedChainBuild(benchmark::State& state) {
    Scenario sc = experiment_scenario(1.0);
    Strategy st = mid_strategy(8);
    NormalApproxDecoding model(sc);
    for (auto _ : state) benchmark::DoNotOptimize(build_reduced_chain(sc, st, model));
}
BENCHMARK(BM_ReducedChainBuild);

void BM_FullAnalysis(benchmark::State& state) {
    Scenario sc = experiment_scenario(1.0);
    Strategy st = mid_strategy(8);
    NormalApproxDecoding model(sc);
    for (auto _ : state)
        benchmark::DoNotOptimize(analyze(sc, st, PenaltySpec{1, 2}, model));
}
BENCHMARK(BM_FullAnalysis);

void BM_ObjectiveEvaluation(benchmark::State& state) {
    Scenario sc = experiment_scenario(1.0);
    NormalApproxDecoding model(sc);
    Objective objective(sc, StrategyClass::Hybrid, OptimizationTarget::AverageAoii,
                        PenaltySpec{1, 1}, model);
    std::vector<double> p(objective.layout().count(), 0.4);
    for (auto _ : state) benchmark::DoNotOptimize(objective.evaluate_free(p));
}
BENCHMARK(BM_ObjectiveEvaluation);

void BM_SimulatorSlots(benchmark::State& state) {
    Scenario sc = experiment_scenario(1.0);
    sc.num_devices = static_cast<int>(state.range(0));
    Strategy st = mid_strategy(8);
    NormalApproxDecoding model(sc);
    SimConfig config;
    config.num_slots = 20'000;
    config.warmup_slots = 1'000;
    config.record_period_samples = false;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        config.seed = seed++;
        benchmark::DoNotOptimize(run_simulation(sc, st, model, config));
    }
    state.SetItemsProcessed(state.iterations() * config.num_slots * sc.num_devices);
}
BENCHMARK(BM_SimulatorSlots)->Arg(100)->Arg(1000);

} // namespace

BENCHMARK_MAIN();
