// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include "memfuse/calibration.hpp"
#include "memfuse/loadline.hpp"

using namespace memfuse;

namespace {

const SwitchingParams kM1{235.2, -91.8, 1.07, -0.52};

void BM_ScanSerial(benchmark::State& state) {
    const auto start = saturate(preset_fuse(), -1);
    const auto grid = amplitude_grid(0.01, 5.0, 0.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(
            reference::scan_amplitudes(start, grid, state.range(0), ScanCriterion::DipRecovery));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()) * state.range(0));
}

void BM_ScanParallel(benchmark::State& state) {
    const auto start = saturate(preset_fuse(), -1);
    const auto grid = amplitude_grid(0.01, 5.0, 0.01);
    for (auto _ : state) {
        benchmark::DoNotOptimize(scan_amplitudes(start, grid, state.range(0), ScanCriterion::DipRecovery));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()) * state.range(0));
}

void BM_FitSerial(benchmark::State& state) {
    const auto ramp = amplitude_grid(-2.0, 2.5, 0.05);
    const auto data = synthetic_samples(kM1, ramp, 5.0, 1);
    FitOptions opt;
    opt.grid_step = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(reference::fit_switching_params(data, opt));
}

void BM_FitParallel(benchmark::State& state) {
    const auto ramp = amplitude_grid(-2.0, 2.5, 0.05);
    const auto data = synthetic_samples(kM1, ramp, 5.0, 1);
    FitOptions opt;
    opt.grid_step = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(fit_switching_params(data, opt));
}

void BM_MonteCarloSerial(benchmark::State& state) {
    const auto ramp = amplitude_grid(-2.0, 2.5, 0.05);
    const auto runs = static_cast<int>(state.range(0));
    for (auto _ : state) {
        int within = 0;
        for (int i = 0; i < runs; ++i) {
            const auto fit = reference::fit_switching_params(synthetic_samples(kM1, ramp, 5.0, i));
            within += fit_within(fit, kM1, {}) ? 1 : 0;
        }
        benchmark::DoNotOptimize(within);
    }
}

void BM_MonteCarloParallel(benchmark::State& state) {
    const auto ramp = amplitude_grid(-2.0, 2.5, 0.05);
    const auto runs = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(monte_carlo_fit(kM1, ramp, 5.0, runs, 0));
}

}  // namespace

BENCHMARK(BM_ScanSerial)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ScanParallel)->Arg(500)->Arg(5000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FitSerial)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_FitParallel)->Arg(100)->Arg(1000)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_MonteCarloSerial)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MonteCarloParallel)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
