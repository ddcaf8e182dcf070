// Parallel scan kernels against their serial references.
#include <benchmark/benchmark.h>

#include "vforge/scans.hpp"

using namespace vforge;

namespace {

scans::ScanGrid floor_grid(std::size_t p_count) {
    scans::ScanGrid grid;
    grid.P_values = scans::log_grid(1e-2, 1e4, p_count);
    grid.a_values = scans::linear_grid(-1.0 + 1e-6, 0.9, 100);
    return grid;
}

void BM_FloorParallel(benchmark::State& state) {
    const auto grid = floor_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(scans::uniform_ball_floor(grid).min_virial);
    state.SetItemsProcessed(state.iterations() * grid.P_values.size() * grid.a_values.size());
}

void BM_FloorSerial(benchmark::State& state) {
    const auto grid = floor_grid(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(scans::uniform_ball_floor_serial(grid).min_virial);
    state.SetItemsProcessed(state.iterations() * grid.P_values.size() * grid.a_values.size());
}

void BM_ScalingParallel(benchmark::State& state) {
    const auto grid = scans::log_grid(1e2, 1e4, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(scans::asymptotic_scaling(grid, -0.9).alpha_fit.slope);
    state.SetItemsProcessed(state.iterations() * grid.size());
}

void BM_ScalingSerial(benchmark::State& state) {
    const auto grid = scans::log_grid(1e2, 1e4, static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(scans::asymptotic_scaling_serial(grid, -0.9).alpha_fit.slope);
    state.SetItemsProcessed(state.iterations() * grid.size());
}

}  // namespace

BENCHMARK(BM_FloorParallel)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_FloorSerial)->Arg(200)->Arg(2000)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScalingParallel)->Arg(9)->Arg(400)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_ScalingSerial)->Arg(9)->Arg(400)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
