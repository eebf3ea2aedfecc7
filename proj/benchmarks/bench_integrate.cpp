#include <benchmark/benchmark.h>

#include <memory>

#include "vfsk/integrate.hpp"
#include "vfsk/noise.hpp"

using namespace vfsk;

namespace {

ModelSpec sine_spec(double eps) {
    ModelSpec s;
    s.friction = fields::sinusoidal(2.0, 1.0, {1.0, 0.0, 0.0}, 1);
    s.drift = drifts::zero(1);
    s.oscillation_scale = eps;
    s.horizon = 1.0;
    return s;
}

constexpr double kStep = 1e-4;

}  // namespace

static void BM_SampleWiener(benchmark::State& st) {
    std::uint64_t k = 0;
    for (auto _ : st) benchmark::DoNotOptimize(sample_wiener(1, 1.0, kStep, 1, k++));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(1.0 / kStep));
}
BENCHMARK(BM_SampleWiener)->Unit(benchmark::kMillisecond);

static void BM_ItoLimit(benchmark::State& st) {
    const ModelSpec s = sine_spec(0.01);
    const WienerPath w = sample_wiener(1, 1.0, kStep, 1, 0);
    ItoOptions opt;
    opt.scheme = st.range(0) ? ItoScheme::Heun : ItoScheme::EulerMaruyama;
    for (auto _ : st) benchmark::DoNotOptimize(simulate_ito_limit(s, w, kStep, opt));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(1.0 / kStep));
}
BENCHMARK(BM_ItoLimit)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_LangevinWhite(benchmark::State& st) {
    ModelSpec s = sine_spec(1.0);
    s.mass = 1e-3;
    const WienerPath w = sample_wiener(1, 1.0, kStep, 1, 0);
    for (auto _ : st) benchmark::DoNotOptimize(simulate_langevin_white(s, w, kStep));
    st.SetItemsProcessed(st.iterations() * static_cast<std::int64_t>(1.0 / kStep));
}
BENCHMARK(BM_LangevinWhite)->Unit(benchmark::kMillisecond);

static void BM_MollifyAndSmoothLimit(benchmark::State& st) {
    ModelSpec s = sine_spec(1.0);
    const double delta = 0.05;
    auto path = std::make_shared<const WienerPath>(sample_wiener(1, 1.0 + delta, kStep, 1, 0));
    const MollifierKernel kernel = build_kernel();
    for (auto _ : st) {
        const MollifiedNoise noise = mollify(path, kernel, delta, 1.0, kStep / 2);
        benchmark::DoNotOptimize(simulate_smooth_limit(s, noise, kStep));
    }
}
BENCHMARK(BM_MollifyAndSmoothLimit)->Unit(benchmark::kMillisecond);
