#include <benchmark/benchmark.h>

#include "dcw/cycle.hpp"
#include "dcw/macro_ode.hpp"

namespace {

void BM_IntegrateSupercritical(benchmark::State& state) {
    const dcw::ModelParams params{3.0, 3.0, 0.0, 1};
    dcw::MacroOdeOptions opts;
    opts.keep_dense = false;
    for (auto _ : state) {
        const auto traj = dcw::integrate({0.0, 3.0}, params, 50.0, opts);
        benchmark::DoNotOptimize(traj.states.back());
    }
    state.SetLabel("T=50, rtol=1e-9");
}
BENCHMARK(BM_IntegrateSupercritical)->Unit(benchmark::kMillisecond);

void BM_HalfReturn(benchmark::State& state) {
    const dcw::ModelParams params{3.0, 3.0, 0.0, 1};
    for (auto _ : state) {
        const auto half = dcw::half_return(2.0, params);
        benchmark::DoNotOptimize(half.y1);
    }
}
BENCHMARK(BM_HalfReturn)->Unit(benchmark::kMillisecond);

void BM_FindLimitCycle(benchmark::State& state) {
    const dcw::ModelParams params{3.0, 3.0, 0.0, 1};
    for (auto _ : state) {
        const auto result = dcw::find_limit_cycle(params);
        benchmark::DoNotOptimize(result.cycle->y0_p);
    }
}
BENCHMARK(BM_FindLimitCycle)->Unit(benchmark::kMillisecond);

} // namespace
