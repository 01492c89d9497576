#include <benchmark/benchmark.h>

#include <cmath>

#include "alphamod/symbol.hpp"
#include "alphamod/transform.hpp"
#include "alphamod/windows.hpp"

using namespace alphamod;

namespace {

Signal test_signal(std::size_t n) {
    return Signal::sample(SampledGrid::centered(n, 1.0 / 32.0), [](double t) {
        return std::exp(-t * t / 8.0) * std::exp(complex(0.0, 2.0 * t * t));
    });
}

void BM_VoiceTransform(benchmark::State& state, TransformPath path) {
    const auto f = test_signal(static_cast<std::size_t>(state.range(0)));
    const auto& g = f.grid();
    // Every fourth sample in x keeps the grid a sublattice, so the FFT path applies.
    const SampledGrid xg(g.size() / 4, 4.0 * g.spacing(), g.front());
    const auto wg = SampledGrid::linspace(-8.0, 8.0, 64);
    const Window w = gaussian_window();
    for (auto _ : state) benchmark::DoNotOptimize(voice_transform(f, w, 0.5, xg, wg, path));
    state.SetItemsProcessed(state.iterations() * xg.size() * wg.size());
}
BENCHMARK_CAPTURE(BM_VoiceTransform, fft, TransformPath::fft)->Arg(512)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_VoiceTransform, direct, TransformPath::direct)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_ReproducingKernel(benchmark::State& state) {
    const Window w = gaussian_window();
    const auto tab = admissibility_scan(w, 0.5);
    double omega = 0.0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(reproducing_kernel(w, 0.5, tab, {0.0, omega}, {0.3, omega + 0.7}));
        omega = omega < 20.0 ? omega + 0.41 : 0.0;
    }
}
BENCHMARK(BM_ReproducingKernel)->Unit(benchmark::kMicrosecond);

}  // namespace
