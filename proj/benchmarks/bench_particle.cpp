#include <benchmark/benchmark.h>

#include "dcw/chaos.hpp"
#include "dcw/particle.hpp"

namespace {

void BM_ThinningEvents(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const dcw::ModelParams params{3.0, 3.0, 0.1, n};
    const dcw::InitialCondition init{0.0, 3.0};
    dcw::ParticleSystem system(params, init, 42);
    for (auto _ : state) {
        const auto proposal = system.propose_and_thin();
        if (proposal.accepted) system.apply_flip(proposal.particle);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_ThinningEvents)->Arg(100)->Arg(10000);

void BM_OuTransition(benchmark::State& state) {
    const dcw::ModelParams params{3.0, 0.0, 0.1, 1};
    dcw::Rng rng(7, 0);
    double xi = 3.0;
    for (auto _ : state) {
        xi = dcw::ou_transition(xi, 1e-3, params, rng);
        benchmark::DoNotOptimize(xi);
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_OuTransition);

void BM_CoupledRun(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const dcw::ModelParams params{3.0, 1.0, 0.1, n};
    const dcw::InitialCondition init{0.0, 3.0};
    for (auto _ : state) {
        const auto result = dcw::coupled_run(params, init, 1.0, 1, 42);
        benchmark::DoNotOptimize(result.d_n);
    }
}
BENCHMARK(BM_CoupledRun)->Arg(250)->Arg(1000)->Unit(benchmark::kMillisecond);

} // namespace
