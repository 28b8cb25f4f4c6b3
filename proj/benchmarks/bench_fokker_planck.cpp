#include <benchmark/benchmark.h>

#include "dcw/fokker_planck.hpp"

namespace {

void BM_FpStep(benchmark::State& state) {
    const dcw::ModelParams params{3.0, 3.0, 0.1, 1};
    const auto grid = dcw::Grid::make(6.25, static_cast<int>(state.range(0)));
    auto density = dcw::mollified_delta(grid, 3.0, 0.0);
    const double dt = dcw::stable_dt(grid, params);
    for (auto _ : state) {
        dcw::fp_step(density, dt, params);
        benchmark::DoNotOptimize(density.nu.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FpStep)->Arg(512)->Arg(1024)->Arg(2048);

void BM_ComputeG(benchmark::State& state) {
    const auto grid = dcw::Grid::make(6.25, 2048);
    const auto density = dcw::mollified_delta(grid, 3.0, 0.0);
    for (auto _ : state) {
        benchmark::DoNotOptimize(dcw::compute_g(density));
    }
    state.SetItemsProcessed(state.iterations() * grid.n_cells);
}
BENCHMARK(BM_ComputeG);

} // namespace
