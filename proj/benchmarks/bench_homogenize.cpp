#include <benchmark/benchmark.h>

#include "vfsk/gendiff1d.hpp"
#include "vfsk/homogenize.hpp"

using namespace vfsk;

static void BM_SolveCell(benchmark::State& st) {
    const int dim = static_cast<int>(st.range(0));
    const int n = static_cast<int>(st.range(1));
    const FrictionField lambda =
        dim == 1 ? fields::sinusoidal(2.0, 1.0, {1.0, 0.0, 0.0}, 1) : fields::sinusoidal(2.0, 0.5, {1.0, 1.0, 0.0}, 2);
    const TorusGrid grid(dim, n);
    for (auto _ : st) benchmark::DoNotOptimize(solve_cell(lambda, grid));
}
BENCHMARK(BM_SolveCell)->Args({1, 128})->Args({2, 64})->Args({2, 128})->Unit(benchmark::kMillisecond);

static void BM_ExitChain(benchmark::State& st) {
    const ScaleSpeed ss =
        compute_scale_speed(drifts::zero(1), fields::step(1.0, 2.0), uniform_grid(-1.0, 1.0, st.range(0), {0.0}));
    StoppingRule rule;
    rule.interval = std::pair{1.0, 1.0};
    std::uint64_t k = 0;
    for (auto _ : st) benchmark::DoNotOptimize(simulate_gendiff(ss, 0.0, rule, 1, k++));
}
BENCHMARK(BM_ExitChain)->Arg(200)->Arg(800);

BENCHMARK_MAIN();
