#include "asymsim/cholesky.hpp"
#include "asymsim/engine.hpp"
#include "asymsim/platform.hpp"
#include "asymsim/scheduler.hpp"

#include <benchmark/benchmark.h>

using namespace asymsim;

static void BM_GenerateCholesky(benchmark::State& state) {
    const int s = static_cast<int>(state.range(0));
    for (auto _ : state) {
        TaskGraph g = generate_cholesky({128 * s, 128});
        benchmark::DoNotOptimize(g.task_count());
    }
}
BENCHMARK(BM_GenerateCholesky)->Arg(8)->Arg(16)->Arg(32);

static void BM_ComputeBlevels(benchmark::State& state) {
    const int s = static_cast<int>(state.range(0));
    const BLevelWeights w =
        state.range(1) == 0 ? BLevelWeights::Unit : BLevelWeights::Flops;
    const TaskGraph g = generate_cholesky({128 * s, 128});
    for (auto _ : state) {
        BLevelTable t = compute_blevels(g, w);
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(BM_ComputeBlevels)->Args({16, 0})->Args({16, 1})->Args({32, 0});

static void BM_Simulate(benchmark::State& state) {
    const int s = static_cast<int>(state.range(0));
    PolicyConfig cfg;
    cfg.kind = static_cast<PolicyKind>(state.range(1));
    if (cfg.kind == PolicyKind::Ts2)
        cfg.n_thres_pct = 30.0;
    const TaskGraph g = generate_cholesky({128 * s, 128});
    const PlatformModel platform = PlatformModel::exynos5422_default();
    for (auto _ : state) {
        SimulationResult r = simulate(g, platform, {}, cfg);
        benchmark::DoNotOptimize(r.makespan_s);
    }
    state.counters["tasks"] = static_cast<double>(g.task_count());
}
BENCHMARK(BM_Simulate)
    ->Args({8, static_cast<int>(PolicyKind::PBotlev)})
    ->Args({8, static_cast<int>(PolicyKind::Fs2)})
    ->Args({8, static_cast<int>(PolicyKind::Ts2)})
    ->Args({16, static_cast<int>(PolicyKind::PBotlev)})
    ->Args({16, static_cast<int>(PolicyKind::Ts2)});

BENCHMARK_MAIN();
